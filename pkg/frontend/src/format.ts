/** Display formatting for joint values and coordinates. */

import type { JointKind } from "./wire.js";

const DEG = 180 / Math.PI;

/** Fixed-point with negative zero folded away. */
export function fmt(value: number, digits = 3): string {
  const rounded = Number(value.toFixed(digits)) + 0;
  return rounded.toFixed(digits);
}

export function radToDeg(value: number): number {
  return value * DEG;
}

export function degToRad(value: number): number {
  return value / DEG;
}

/**
 * Human label for one joint value: degrees for revolute joints, metres for
 * prismatic ones. The wire always carries radians and metres; conversion
 * happens only at the label.
 */
export function jointLabel(kind: JointKind, value: number): string {
  if (kind === "revolute") {
    return `${fmt(radToDeg(value), 1)}°`;
  }
  return `${fmt(value, 3)} m`;
}

export function pointLabel(position: number[]): string {
  return position.map((v) => fmt(v, 3)).join(", ");
}
