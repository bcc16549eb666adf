/**
 * View data for the arm itself: polyline through the streamed frame origins
 * plus a small axis triad at each frame. Pure data in, pure data out, so the
 * tests can assert on it without a DOM.
 */

import { add, frameAxes, frameOrigin, project } from "./projection.js";
import type { Vec2, Vec3 } from "./projection.js";
import type { Frame } from "./wire.js";

export interface Triad {
  origin: Vec2;
  x: Vec2;
  y: Vec2;
  z: Vec2;
}

export interface ChainView {
  /** Projected polyline: base at index 0, then one point per frame. */
  points: Vec2[];
  /** World-space origins backing those points, for labels and fitting. */
  origins: Vec3[];
  triads: Triad[];
  /** Projected tool frame origin (last point, repeated for convenience). */
  tip: Vec2;
}

export const TRIAD_LENGTH = 0.12;

export function chainView(frames: Frame[], triadLength = TRIAD_LENGTH): ChainView {
  const origins: Vec3[] = [[0, 0, 0]];
  for (const frame of frames) {
    origins.push(frameOrigin(frame));
  }
  const points = origins.map(project);
  const triads: Triad[] = frames.map((frame) => {
    const o = frameOrigin(frame);
    const axes = frameAxes(frame);
    return {
      origin: project(o),
      x: project(add(o, axes.x, triadLength)),
      y: project(add(o, axes.y, triadLength)),
      z: project(add(o, axes.z, triadLength)),
    };
  });
  const tip = points[points.length - 1] ?? [0, 0];
  return { points, origins, triads, tip };
}
