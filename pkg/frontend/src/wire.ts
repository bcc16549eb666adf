/**
 * Types for the JSON the service speaks. Field names and shapes mirror the
 * server's serializers one to one; nothing here is computed, it only names
 * what arrives over HTTP and the event stream.
 */

/** Homogeneous 4x4 transform, row major, 16 numbers. */
export type Frame = number[];

export type JointKind = "revolute" | "prismatic";

export type SessionMode =
  | "menu"
  | "direct_kinematics"
  | "inverse_kinematics"
  | "validate";

export interface JointSummary {
  name: string;
  kind: JointKind;
  axis: number[];
  origin_xyz: number[];
  origin_rpy: number[];
  limits: [number, number];
  home: number;
}

export interface IkBinding {
  family: string;
  joints: string[];
}

export interface ModelSummary {
  name: string;
  family: string;
  dof: number;
  joints: JointSummary[];
  tool_xyz: number[];
  tool_rpy: number[];
  ik_binding: IkBinding | null;
}

export interface WireTarget {
  position: number[];
  frame: string;
}

export interface WireSolution {
  branch: string;
  q_partial: number[];
  feasible: boolean;
  infeasibility_reason: string | null;
  singular: boolean;
  /** Frame chain of this branch's configuration, same layout as StateEvent.frames. */
  frames: Frame[];
}

export interface WireSolutionSet {
  target: WireTarget;
  reachable: boolean;
  solutions: WireSolution[];
}

export interface WireDiff {
  index: number;
  diff: Frame;
  max_abs_error: number;
  passed: boolean;
  reason: string | null;
}

export interface StateEvent {
  session_id: string;
  revision: number;
  mode: SessionMode;
  model: string;
  q: number[];
  frames: Frame[];
  animating: boolean;
  target?: WireTarget;
  solutions?: WireSolutionSet;
  clamped_flags?: boolean[];
  diffs?: WireDiff[];
}

export interface CommandResponse {
  revision: number;
  changed: boolean;
  state: StateEvent;
}

export interface CreateSessionResponse {
  session_id: string;
  state: StateEvent;
}

export interface WireError {
  error: { code: string; message: string };
}

export type Command =
  | { type: "set_mode"; mode: SessionMode; expected_revision?: number }
  | { type: "set_joint"; joint: number; value: number; expected_revision?: number }
  | {
      type: "request_ik";
      target: number[];
      branch?: string;
      duration?: number;
      expected_revision?: number;
    }
  | { type: "choose_branch"; branch: string; duration?: number; expected_revision?: number }
  | {
      type: "validate_matrices";
      matrices: number[][][];
      mode?: "factors" | "product";
      tolerance?: number;
      expected_revision?: number;
    }
  | { type: "reset"; expected_revision?: number };
