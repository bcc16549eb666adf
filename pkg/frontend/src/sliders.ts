/**
 * Joint slider view data for direct kinematics mode. Slider positions carry
 * the wire units (radians or metres); only min/max/step and the printed
 * label are converted for display.
 */

import { jointLabel } from "./format.js";
import type { JointKind, ModelSummary, StateEvent } from "./wire.js";

export interface SliderView {
  joint: number;
  name: string;
  kind: JointKind;
  min: number;
  max: number;
  step: number;
  value: number;
  label: string;
  /** True on the event that clamped this joint to a limit. */
  clamped: boolean;
}

function stepFor(kind: JointKind): number {
  return kind === "revolute" ? Math.PI / 180 : 0.001;
}

export function sliderViews(model: ModelSummary, event: StateEvent): SliderView[] {
  return model.joints.map((joint, index) => {
    const value = event.q[index] ?? joint.home;
    return {
      joint: index,
      name: joint.name,
      kind: joint.kind,
      min: joint.limits[0],
      max: joint.limits[1],
      step: stepFor(joint.kind),
      value,
      label: jointLabel(joint.kind, value),
      clamped: event.clamped_flags?.[index] ?? false,
    };
  });
}
