/**
 * Wire types for the /v1 planning API. The UI never computes these numbers
 * itself; every displayed value comes from a response field.
 */

export interface CellTarget {
  moe?: number | null;
  rho?: number | null;
}

export interface PlanLevelDraft {
  geo_level: string;
  iter_level: string;
  household_type: CellTarget;
  tenure: CellTarget;
}

export interface PlanRequest {
  levels: PlanLevelDraft[];
  race_multiplicity: number;
  confidence: number;
}

export interface Provenance {
  formula: string;
  inputs: Record<string, number>;
}

export interface PlanCellResult {
  rho_unbounded: number;
  rho_bounded: number;
  moe: number;
  provenance: Provenance;
}

export interface PlanLevelResult {
  geo_level: string;
  iter_level: string;
  household_type: PlanCellResult;
  tenure: PlanCellResult;
}

export interface PlanResult {
  stability: number;
  z: number;
  levels: PlanLevelResult[];
  total_unbounded: number;
  total_bounded: number;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ServiceMetadata {
  geo_levels: string[];
  iter_levels: string[];
  forbidden_levels: { geo_level: string; iter_level: string }[];
  default_confidence: number;
  default_z: number;
  race_multiplicity: { min: number; max: number; default: number };
}

/** Per-level fragment of the run configuration consumed by the engine CLI. */
export interface ConfigFragmentLevel {
  geo_level: string;
  iter_level: string;
  rho_ht: number;
  rho_t: number;
}

export interface ConfigFragment {
  total_budget: number;
  levels: ConfigFragmentLevel[];
}
