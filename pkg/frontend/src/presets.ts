// Preset handling for the target picker: selecting a preset fills all four
// numeric fields exactly as served.

import type { TargetProfile } from "./types.js";
import type { TargetInput } from "./validation.js";

export function applyPreset(preset: TargetProfile): TargetInput & { name: string } {
  return {
    name: preset.name,
    abv: preset.abv,
    ibu: preset.ibu,
    srm: preset.srm,
    target_error: preset.target_error,
  };
}

export function findPreset(
  presets: TargetProfile[],
  name: string,
): TargetProfile | undefined {
  return presets.find((p) => p.name === name);
}
