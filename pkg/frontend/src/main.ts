/** DOM wiring for the budget/error tuning table. */

import { PlanClient } from './api.js';
import { fragmentFileName, fragmentJson } from './export.js';
import { formatRho, formatTotal } from './format.js';
import { publishedDraft, SessionStore } from './state.js';
import type { CellTarget, PlanLevelResult } from './types.js';

const DEFAULT_BASE_URL = 'http://127.0.0.1:8008/v1';

const GEO_LEVELS = ['Nation', 'State', 'County', 'Tract', 'Place', 'AIANNH'];
const ITER_LEVELS = ['Detailed', 'Regional'];

const client = new PlanClient(DEFAULT_BASE_URL);
const store = new SessionStore(
  { evaluate: (request, signal) => client.evaluate(request, signal) },
  publishedDraft(),
);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function targetControls(
  levelIndex: number,
  table: 'household_type' | 'tenure',
  target: CellTarget,
): HTMLElement {
  const mode = target.rho != null ? 'rho' : 'moe';
  const select = el('select', { 'data-field': `levels[${levelIndex}].${table}.mode` });
  for (const option of ['moe', 'rho']) {
    const opt = el('option', { value: option }, option === 'moe' ? 'MOE' : 'rho');
    if (option === mode) opt.setAttribute('selected', '');
    select.append(opt);
  }
  const value = mode === 'rho' ? target.rho : target.moe;
  const input = el('input', {
    type: 'number',
    step: mode === 'rho' ? '0.0001' : '1',
    min: mode === 'rho' ? '0.000001' : '1',
    value: value == null ? '' : String(value),
    'data-field': `levels[${levelIndex}].${table}.${mode}`,
  });
  select.addEventListener('change', () => {
    store.edit((draft) => {
      const lvl = draft.levels[levelIndex];
      if (!lvl) return;
      const current = lvl[table];
      if (select.value === 'rho') {
        lvl[table] = { rho: current.moe ?? 1.92 };
      } else {
        lvl[table] = { moe: current.rho != null ? Math.max(1, Math.round(current.rho)) : 3 };
      }
    });
  });
  input.addEventListener('change', () => {
    const parsed = input.value === '' ? null : Number(input.value);
    store.edit((draft) => {
      const lvl = draft.levels[levelIndex];
      if (!lvl) return;
      lvl[table] = select.value === 'rho' ? { rho: parsed } : { moe: parsed };
    });
  });
  const wrapper = el('div', { class: 'target' }, select, input);
  return wrapper;
}

function resultCells(result: PlanLevelResult | undefined, table: 'household_type' | 'tenure'): HTMLElement[] {
  if (!result) {
    return [el('td', { class: 'num' }, '—'), el('td', { class: 'num' }, '—'), el('td', { class: 'num' }, '—')];
  }
  const cell = result[table];
  return [
    el('td', { class: 'num', title: cell.provenance.formula }, formatRho(cell.rho_unbounded)),
    el('td', { class: 'num' }, formatRho(cell.rho_bounded)),
    el('td', { class: 'num' }, String(cell.moe)),
  ];
}

function fieldErrorsBadge(prefix: string): HTMLElement | null {
  const matches = store.getErrors().filter((e) => e.field.startsWith(prefix));
  if (matches.length === 0) return null;
  return el(
    'div',
    { class: 'field-error' },
    matches.map((e) => e.message).join('; '),
  );
}

function render(): void {
  const root = document.getElementById('app');
  if (!root) return;
  root.replaceChildren();

  const draft = store.getDraft();
  const result = store.getResult();

  // controls row
  const multiplicity = el('select', { id: 'race-multiplicity' });
  for (let m = 1; m <= 8; m += 1) {
    const opt = el('option', { value: String(m) }, String(m));
    if (m === draft.race_multiplicity) opt.setAttribute('selected', '');
    multiplicity.append(opt);
  }
  multiplicity.addEventListener('change', () => {
    store.edit((d) => {
      d.race_multiplicity = Number(multiplicity.value);
    });
  });
  const confidence = el('input', {
    id: 'confidence',
    type: 'number',
    step: '0.001',
    min: '0.5',
    max: '0.999',
    value: String(draft.confidence),
  });
  confidence.addEventListener('change', () => {
    store.edit((d) => {
      d.confidence = Number(confidence.value);
    });
  });
  const serverUrl = el('input', {
    id: 'server-url',
    type: 'text',
    value: client.getBaseUrl(),
    size: '32',
  });
  serverUrl.addEventListener('change', () => {
    client.setBaseUrl(serverUrl.value);
    store.edit(() => undefined);
  });

  const sensitivity =
    result === null
      ? 'stability —'
      : `stability ${result.stability} (changing race multiplicity rescales every MOE; z = ${formatRho(result.z)})`;

  root.append(
    el(
      'section',
      { class: 'controls' },
      el('label', {}, 'service ', serverUrl),
      el('label', {}, 'race multiplicity ', multiplicity),
      el('label', {}, 'confidence ', confidence),
      el('span', { class: 'sensitivity', id: 'sensitivity' }, sensitivity),
    ),
  );
  const globalErrors = fieldErrorsBadge('');
  if (globalErrors) root.append(globalErrors);

  // the tuning table mirrors the published budget table layout
  const head = el(
    'tr',
    {},
    el('th', {}, 'population group level'),
    el('th', { colspan: '1' }, 'HT target'),
    el('th', {}, 'HT rho'),
    el('th', {}, 'HT 2rho'),
    el('th', {}, 'HT MOE'),
    el('th', {}, 'T target'),
    el('th', {}, 'T rho'),
    el('th', {}, 'T 2rho'),
    el('th', {}, 'T MOE'),
    el('th', {}, ''),
  );
  const table = el('table', { id: 'plan-table' }, el('thead', {}, head));
  const body = el('tbody', {});
  draft.levels.forEach((level, index) => {
    // last evaluated numbers; the stale badge flags any gap to the draft
    const resultLevel = result?.levels[index];
    const remove = el('button', { class: 'remove', title: 'remove level' }, 'x');
    remove.addEventListener('click', () => {
      store.edit((d) => {
        d.levels.splice(index, 1);
      });
    });
    const geoSelect = el('select', { 'data-field': `levels[${index}].geo_level` });
    for (const geo of GEO_LEVELS) {
      const opt = el('option', { value: geo }, geo);
      if (geo === level.geo_level) opt.setAttribute('selected', '');
      geoSelect.append(opt);
    }
    geoSelect.addEventListener('change', () => {
      store.edit((d) => {
        const lvl = d.levels[index];
        if (lvl) lvl.geo_level = geoSelect.value;
      });
    });
    const iterSelect = el('select', { 'data-field': `levels[${index}].iter_level` });
    for (const iter of ITER_LEVELS) {
      const opt = el('option', { value: iter }, iter);
      if (iter === level.iter_level) opt.setAttribute('selected', '');
      iterSelect.append(opt);
    }
    iterSelect.addEventListener('change', () => {
      store.edit((d) => {
        const lvl = d.levels[index];
        if (lvl) lvl.iter_level = iterSelect.value;
      });
    });

    const row = el(
      'tr',
      {},
      el('td', {}, geoSelect, ' / ', iterSelect),
      el('td', {}, targetControls(index, 'household_type', level.household_type)),
      ...resultCells(resultLevel, 'household_type'),
      el('td', {}, targetControls(index, 'tenure', level.tenure)),
      ...resultCells(resultLevel, 'tenure'),
      el('td', {}, remove),
    );
    body.append(row);
    const rowErrors = fieldErrorsBadge(`levels[${index}]`);
    if (rowErrors) {
      body.append(el('tr', {}, el('td', { colspan: '10' }, rowErrors)));
    }
  });
  table.append(body);
  root.append(table);

  // totals and actions
  const totals = el(
    'div',
    { class: 'totals', id: 'totals' },
    result === null
      ? 'no evaluation yet'
      : `privacy loss: ${formatTotal(result.total_unbounded)} unbounded / ` +
          `${formatTotal(result.total_bounded)} bounded zCDP`,
  );
  if (store.isStale()) {
    totals.append(
      el('span', { class: 'stale', id: 'stale-badge' }, ' (stale, re-evaluating...)'),
    );
  }
  const addLevel = el('button', { id: 'add-level' }, 'add level');
  addLevel.addEventListener('click', () => {
    store.edit((d) => {
      d.levels.push({
        geo_level: 'Nation',
        iter_level: 'Detailed',
        household_type: { moe: 3 },
        tenure: { moe: 3 },
      });
    });
  });
  const preset = el('button', { id: 'preset' }, 'published production targets');
  preset.addEventListener('click', () => {
    store.edit((d) => {
      Object.assign(d, publishedDraft());
    });
  });
  const clear = el('button', { id: 'clear' }, 'clear levels');
  clear.addEventListener('click', () => {
    store.edit((d) => {
      d.levels = [];
    });
  });
  const undo = el('button', { id: 'undo' }, 'undo');
  if (!store.canUndo()) undo.setAttribute('disabled', '');
  undo.addEventListener('click', () => store.undo());
  const exportButton = el('button', { id: 'export' }, 'export budget fragment');
  if (!store.canExport()) exportButton.setAttribute('disabled', '');
  exportButton.addEventListener('click', () => {
    const current = store.getResult();
    if (current === null || !store.canExport()) return;
    const blob = new Blob([fragmentJson(current)], { type: 'application/json' });
    const link = el('a', {
      href: URL.createObjectURL(blob),
      download: fragmentFileName(),
    });
    link.click();
    URL.revokeObjectURL(link.href);
  });
  root.append(
    el('section', { class: 'actions' }, addLevel, preset, clear, undo, exportButton),
    totals,
  );
}

store.subscribe(render);
render();
void store.flush();
