import { describe, expect, it } from "vitest";

import {
  add,
  fitToViewport,
  frameAxes,
  frameOrigin,
  project,
} from "../src/projection.js";
import type { Vec2 } from "../src/projection.js";

const IDENTITY = [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];

describe("frame accessors", () => {
  it("reads the translation column of a row-major frame", () => {
    const frame = [...IDENTITY];
    frame[3] = 0.5;
    frame[7] = -1.5;
    frame[11] = 2.0;
    expect(frameOrigin(frame)).toEqual([0.5, -1.5, 2.0]);
  });

  it("reads rotation columns as axis vectors", () => {
    // 90 degrees about z: x axis maps to world y.
    const frame = [0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];
    const axes = frameAxes(frame);
    expect(axes.x).toEqual([0, 1, 0]);
    expect(axes.y).toEqual([-1, 0, 0]);
    expect(axes.z).toEqual([0, 0, 1]);
  });
});

describe("project", () => {
  it("keeps the origin at the screen origin", () => {
    expect(project([0, 0, 0])).toEqual([0, 0]);
  });

  it("treats +x and +y symmetrically about the vertical axis", () => {
    const [xx, xy] = project([1, 0, 0]);
    const [yx, yy] = project([0, 1, 0]);
    expect(xx).toBeCloseTo(-yx, 12);
    expect(xy).toBeCloseTo(yy, 12);
  });

  it("maps +z straight up on screen", () => {
    const [sx, sy] = project([0, 0, 1]);
    expect(sx).toBe(0);
    expect(sy).toBe(-1);
  });

  it("is linear", () => {
    const p = project(add([0.2, 0.7, -0.3], [1, 2, 3], 0.5));
    const a = project([0.2, 0.7, -0.3]);
    const b = project([0.5, 1.0, 1.5]);
    expect(p[0]).toBeCloseTo(a[0] + b[0], 12);
    expect(p[1]).toBeCloseTo(a[1] + b[1], 12);
  });
});

describe("fitToViewport", () => {
  const view = { width: 640, height: 480, margin: 40 };

  it("maps every point inside the margins", () => {
    const cloud: Vec2[] = [
      [-2, -1],
      [3, 2],
      [0.5, 0.5],
      [1, -0.5],
    ];
    const toPx = fitToViewport(cloud, view);
    for (const point of cloud) {
      const [x, y] = toPx(point);
      expect(x).toBeGreaterThanOrEqual(view.margin - 1e-9);
      expect(x).toBeLessThanOrEqual(view.width - view.margin + 1e-9);
      expect(y).toBeGreaterThanOrEqual(view.margin - 1e-9);
      expect(y).toBeLessThanOrEqual(view.height - view.margin + 1e-9);
    }
  });

  it("preserves aspect ratio", () => {
    const cloud: Vec2[] = [
      [0, 0],
      [2, 1],
    ];
    const toPx = fitToViewport(cloud, view);
    const a = toPx([0, 0]);
    const b = toPx([2, 1]);
    const dx = b[0] - a[0];
    const dy = b[1] - a[1];
    expect(dx / dy).toBeCloseTo(2, 9);
  });

  it("centres a single point instead of dividing by zero", () => {
    const toPx = fitToViewport([[5, 5]], view);
    expect(toPx([5, 5])).toEqual([view.width / 2, view.height / 2]);
  });

  it("stays finite with no points at all", () => {
    const toPx = fitToViewport([], view);
    const [x, y] = toPx([0, 0]);
    expect(Number.isFinite(x)).toBe(true);
    expect(Number.isFinite(y)).toBe(true);
  });
});
