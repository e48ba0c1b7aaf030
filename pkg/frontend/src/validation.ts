// Client-side target validation. Mirrors the service's rules so a valid
// form never produces a 400: targets non-negative within the panel ranges,
// termination error strictly positive.

export interface TargetInput {
  abv: number | null;
  ibu: number | null;
  srm: number | null;
  target_error: number | null;
}

export interface FieldError {
  field: keyof TargetInput;
  message: string;
}

export const RANGES = {
  abv: { min: 0, max: 20 },
  ibu: { min: 0, max: 200 },
  srm: { min: 0, max: 50 },
} as const;

export function validateTarget(input: TargetInput): FieldError[] {
  const errors: FieldError[] = [];
  for (const field of ["abv", "ibu", "srm"] as const) {
    const value = input[field];
    const range = RANGES[field];
    if (value === null || Number.isNaN(value)) {
      errors.push({ field, message: `${field} is required` });
    } else if (value < range.min || value > range.max) {
      errors.push({
        field,
        message: `${field} must be between ${range.min} and ${range.max}`,
      });
    }
  }
  const err = input.target_error;
  if (err === null || Number.isNaN(err)) {
    errors.push({ field: "target_error", message: "target error is required" });
  } else if (err <= 0) {
    errors.push({ field: "target_error", message: "target error must be > 0" });
  }
  return errors;
}

export function canSubmit(input: TargetInput): boolean {
  return validateTarget(input).length === 0;
}

export function parseNumericField(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : NaN;
}
