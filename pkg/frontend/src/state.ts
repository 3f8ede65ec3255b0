/**
 * Session state: the request draft, the last evaluated result, undo history,
 * and the debounced evaluation loop.
 *
 * Invariants: the displayed result always corresponds to the last draft that
 * evaluated successfully (`isStale()` flags the gap while the current draft
 * differs), and an in-flight evaluation is superseded by any newer edit.
 */

import { PlanServiceError } from './api.js';
import type { FieldError, PlanRequest, PlanResult } from './types.js';

export type EvaluateFn = (
  request: PlanRequest,
  signal: AbortSignal,
) => Promise<PlanResult>;

export interface StoreOptions {
  evaluate: EvaluateFn;
  debounceMs?: number;
  maxHistory?: number;
}

export const DEFAULT_DRAFT: PlanRequest = {
  levels: [],
  race_multiplicity: 8,
  confidence: 0.95,
};

/** The production target set: MOE 3/3/11/11/11/11 and 50 for regional levels. */
export const PUBLISHED_TARGETS: ReadonlyArray<[string, string, number]> = [
  ['Nation', 'Detailed', 3],
  ['State', 'Detailed', 3],
  ['County', 'Detailed', 11],
  ['Tract', 'Detailed', 11],
  ['Place', 'Detailed', 11],
  ['AIANNH', 'Detailed', 11],
  ['Nation', 'Regional', 50],
  ['State', 'Regional', 50],
  ['County', 'Regional', 50],
  ['Tract', 'Regional', 50],
  ['Place', 'Regional', 50],
];

export function publishedDraft(): PlanRequest {
  return {
    levels: PUBLISHED_TARGETS.map(([geo_level, iter_level, moe]) => ({
      geo_level,
      iter_level,
      household_type: { moe },
      tenure: { moe },
    })),
    race_multiplicity: 8,
    confidence: 0.95,
  };
}

function clone<T>(value: T): T {
  return structuredClone(value);
}

export class SessionStore {
  private draft: PlanRequest;
  private result: PlanResult | null = null;
  private resultDraft: PlanRequest | null = null;
  private errors: FieldError[] = [];
  private history: PlanRequest[] = [];
  private listeners = new Set<() => void>();
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private generation = 0;
  private inFlight = 0;

  private readonly evaluate: EvaluateFn;
  private readonly debounceMs: number;
  private readonly maxHistory: number;

  constructor(options: StoreOptions, initialDraft: PlanRequest = DEFAULT_DRAFT) {
    this.evaluate = options.evaluate;
    this.debounceMs = options.debounceMs ?? 250;
    this.maxHistory = options.maxHistory ?? 100;
    this.draft = clone(initialDraft);
  }

  // --- reads ---------------------------------------------------------------

  getDraft(): PlanRequest {
    return this.draft;
  }

  getResult(): PlanResult | null {
    return this.result;
  }

  getErrors(): FieldError[] {
    return this.errors;
  }

  isEvaluating(): boolean {
    return this.inFlight > 0 || this.timer !== null;
  }

  /** True while the shown result does not correspond to the current draft. */
  isStale(): boolean {
    if (this.result === null) return this.draft.levels.length > 0;
    return JSON.stringify(this.draft) !== JSON.stringify(this.resultDraft);
  }

  canUndo(): boolean {
    return this.history.length > 0;
  }

  /** Export is allowed only for a non-empty draft whose evaluation is current. */
  canExport(): boolean {
    return (
      this.result !== null &&
      this.result.levels.length > 0 &&
      !this.isStale() &&
      this.errors.length === 0
    );
  }

  errorsFor(field: string): FieldError[] {
    return this.errors.filter((e) => e.field === field);
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  // --- edits ---------------------------------------------------------------

  /** Applies an edit to a copy of the draft and schedules re-evaluation. */
  edit(mutate: (draft: PlanRequest) => void): void {
    this.history.push(clone(this.draft));
    if (this.history.length > this.maxHistory) this.history.shift();
    const next = clone(this.draft);
    mutate(next);
    this.draft = next;
    this.schedule();
    this.notify();
  }

  undo(): boolean {
    const previous = this.history.pop();
    if (previous === undefined) return false;
    this.draft = previous;
    this.schedule();
    this.notify();
    return true;
  }

  /** Runs the pending evaluation immediately (tests, initial load). */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    await this.runEvaluation();
  }

  // --- evaluation loop -----------------------------------------------------

  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.runEvaluation();
    }, this.debounceMs);
  }

  private async runEvaluation(): Promise<void> {
    const generation = ++this.generation;
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const snapshot = clone(this.draft);
    this.inFlight += 1;
    this.notify();
    try {
      const result = await this.evaluate(snapshot, controller.signal);
      if (generation === this.generation) {
        this.result = result;
        this.resultDraft = snapshot;
        this.errors = [];
      }
    } catch (error) {
      if (generation !== this.generation) return;
      if (error instanceof PlanServiceError) {
        this.errors = error.errors;
      } else if ((error as Error)?.name === 'AbortError') {
        // superseded; nothing to record
      } else {
        this.errors = [
          { field: '', message: (error as Error)?.message ?? 'evaluation failed' },
        ];
      }
    } finally {
      this.inFlight -= 1;
      this.notify();
    }
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }
}
