/**
 * Which panels and commands each session mode exposes. The server enforces
 * mode discipline anyway; this keeps the UI from offering buttons that
 * would only come back as wrong_mode errors.
 */

import type { SessionMode } from "./wire.js";

export interface Scene {
  mode: SessionMode;
  title: string;
  showSliders: boolean;
  showIkPanel: boolean;
  showMatrixPanel: boolean;
  canSetJoint: boolean;
  canRequestIk: boolean;
  canValidate: boolean;
  /** Modes reachable in one step, as offered by the mode switcher. */
  nextModes: SessionMode[];
}

const SCENES: Record<SessionMode, Scene> = {
  menu: {
    mode: "menu",
    title: "Menu",
    showSliders: false,
    showIkPanel: false,
    showMatrixPanel: false,
    canSetJoint: false,
    canRequestIk: false,
    canValidate: false,
    nextModes: ["direct_kinematics"],
  },
  direct_kinematics: {
    mode: "direct_kinematics",
    title: "Direct kinematics",
    showSliders: true,
    showIkPanel: false,
    showMatrixPanel: false,
    canSetJoint: true,
    canRequestIk: false,
    canValidate: false,
    nextModes: ["menu", "inverse_kinematics"],
  },
  inverse_kinematics: {
    mode: "inverse_kinematics",
    title: "Inverse kinematics",
    showSliders: false,
    showIkPanel: true,
    showMatrixPanel: false,
    canSetJoint: false,
    canRequestIk: true,
    canValidate: false,
    nextModes: ["direct_kinematics", "validate"],
  },
  validate: {
    mode: "validate",
    title: "Validate matrices",
    showSliders: false,
    showIkPanel: false,
    showMatrixPanel: true,
    canSetJoint: false,
    canRequestIk: false,
    canValidate: true,
    nextModes: ["inverse_kinematics"],
  },
};

export function sceneFor(mode: SessionMode): Scene {
  return SCENES[mode];
}
