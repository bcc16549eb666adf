/**
 * Flattening streamed frames onto the screen.
 *
 * This is the one place the client touches geometry, and it is display-only:
 * every 3D point comes out of a server frame, and the projection is a fixed
 * isometric camera (no state, no kinematics). Screen y grows downward.
 */

import type { Frame } from "./wire.js";

export type Vec3 = [number, number, number];
export type Vec2 = [number, number];

const COS30 = Math.cos(Math.PI / 6);
const SIN30 = Math.sin(Math.PI / 6);

/** Translation column of a wire frame. */
export function frameOrigin(frame: Frame): Vec3 {
  return [frame[3] ?? 0, frame[7] ?? 0, frame[11] ?? 0];
}

/** Unit axis columns of a wire frame's rotation block. */
export function frameAxes(frame: Frame): { x: Vec3; y: Vec3; z: Vec3 } {
  return {
    x: [frame[0] ?? 0, frame[4] ?? 0, frame[8] ?? 0],
    y: [frame[1] ?? 0, frame[5] ?? 0, frame[9] ?? 0],
    z: [frame[2] ?? 0, frame[6] ?? 0, frame[10] ?? 0],
  };
}

/** Isometric projection of a world point to screen coordinates. */
export function project(p: Vec3): Vec2 {
  const [x, y, z] = p;
  return [(x - y) * COS30, (x + y) * SIN30 - z];
}

export function add(a: Vec3, b: Vec3, scale = 1): Vec3 {
  return [a[0] + b[0] * scale, a[1] + b[1] * scale, a[2] + b[2] * scale];
}

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

/**
 * Map projected points into pixel space, preserving aspect ratio. With a
 * single point (or a degenerate cloud) the scale falls back to 1 so the
 * output stays finite.
 */
export function fitToViewport(points: Vec2[], view: Viewport): (p: Vec2) => Vec2 {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  if (!Number.isFinite(minX)) {
    minX = maxX = minY = maxY = 0;
  }
  const spanX = maxX - minX;
  const spanY = maxY - minY;
  const usableW = view.width - 2 * view.margin;
  const usableH = view.height - 2 * view.margin;
  const span = Math.max(spanX, spanY);
  const scale = span > 0 ? Math.min(usableW, usableH) / span : 1;
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  return ([x, y]) => [
    view.width / 2 + (x - cx) * scale,
    view.height / 2 + (y - cy) * scale,
  ];
}
