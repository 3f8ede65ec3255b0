/**
 * Turns an evaluated plan into the per-level budget fragment of a run
 * configuration, closing the tuning-to-execution loop. Values are copied
 * verbatim from the service response at full precision.
 */

import type { ConfigFragment, PlanResult } from './types.js';

export function buildConfigFragment(result: PlanResult): ConfigFragment {
  if (result.levels.length === 0) {
    throw new Error('nothing to export: the plan has no levels');
  }
  return {
    total_budget: result.total_unbounded,
    levels: result.levels.map((level) => ({
      geo_level: level.geo_level,
      iter_level: level.iter_level,
      rho_ht: level.household_type.rho_unbounded,
      rho_t: level.tenure.rho_unbounded,
    })),
  };
}

export function fragmentFileName(): string {
  return 'budget-fragment.json';
}

export function fragmentJson(result: PlanResult): string {
  return JSON.stringify(buildConfigFragment(result), null, 2) + '\n';
}
