/**
 * Ghost configurations for the inverse kinematics panel. Every branch the
 * solver returned is drawn faintly at its own pose, labeled, and marked
 * selectable when feasible. The geometry comes straight from the per-branch
 * frames the server streams; the client never solves anything.
 */

import { frameOrigin, project } from "./projection.js";
import type { Vec2 } from "./projection.js";
import type { WireSolution, WireSolutionSet } from "./wire.js";

export interface GhostView {
  branch: string;
  feasible: boolean;
  singular: boolean;
  selectable: boolean;
  label: string;
  /** Projected polyline of the branch configuration, base included. */
  points: Vec2[];
  qPartial: number[];
}

export interface TargetView {
  position: Vec2;
  reachable: boolean;
}

function ghostLabel(solution: WireSolution): string {
  const notes: string[] = [];
  if (solution.singular) {
    notes.push("singular");
  }
  if (!solution.feasible) {
    notes.push(solution.infeasibility_reason ?? "infeasible");
  }
  return notes.length > 0 ? `${solution.branch} (${notes.join(", ")})` : solution.branch;
}

export function ghostViews(set: WireSolutionSet): GhostView[] {
  return set.solutions.map((solution) => {
    const points: Vec2[] = [project([0, 0, 0])];
    for (const frame of solution.frames) {
      points.push(project(frameOrigin(frame)));
    }
    return {
      branch: solution.branch,
      feasible: solution.feasible,
      singular: solution.singular,
      selectable: solution.feasible,
      label: ghostLabel(solution),
      points,
      qPartial: solution.q_partial,
    };
  });
}

export function targetView(set: WireSolutionSet): TargetView {
  const [x = 0, y = 0, z = 0] = set.target.position;
  return { position: project([x, y, z]), reachable: set.reachable };
}
