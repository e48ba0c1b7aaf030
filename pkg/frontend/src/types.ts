// Payload types mirroring the service's JSON schemas.

export interface TargetProfile {
  name: string;
  abv: number;
  ibu: number;
  srm: number;
  target_error: number;
}

export interface IngredientRecord {
  kind: "hop" | "fermentable" | "yeast";
  name: string;
  stock: number;
  stock_unit: string;
  alpha?: number;
  beta?: number;
  color?: number;
  yield?: number;
  ibu_gal_per_lb?: number;
  moisture?: number;
  diastatic_power?: number;
  attenuation?: number;
  min_temp?: number;
  max_temp?: number;
}

export interface Solution {
  trial: number;
  seed: number;
  error: number;
  fes_used: number;
  recipe: Record<string, number>;
  metrics: Record<string, number>;
}

export interface ClusterReport {
  k: number;
  assignments: number[];
  sizes: number[];
  index_votes: Record<string, number>;
  majority: number;
}

export interface DistanceSummary {
  mean: number;
  stdev: number;
  min: number;
  max: number;
  farthest_pair: [number, number];
}

export interface JobProgress {
  fes_used: number;
  best_error: number | null;
  best_recipe: Record<string, number> | null;
}

export type JobStatus = "queued" | "running" | "done" | "failed";

export interface OptimizeJob {
  id: string;
  status: JobStatus;
  plan: {
    target: TargetProfile;
    algorithm: string;
    trials: number;
    population: number;
    max_fes: number;
    master_seed: number;
  };
  progress: JobProgress;
  results: {
    solutions: Solution[];
    distance_summary: DistanceSummary | null;
    cluster_report: ClusterReport | null;
  } | null;
  error: string | null;
}

export interface OptimizeRequest {
  target: TargetProfile;
  algorithm: string;
  options?: {
    trials?: number;
    population?: number;
    max_fes?: number;
    seed?: number;
  };
}
