/** Display formatting. The only "math" the UI ever does with numbers. */

/** Format to `n` significant figures without exponent noise for UI ranges. */
export function sigFigs(value: number, n: number): string {
  if (!Number.isFinite(value)) return String(value);
  if (value === 0) return '0';
  const precise = value.toPrecision(n);
  // collapse 1.9210000 / 8.895e+0 style artifacts
  const asNumber = Number(precise);
  return Math.abs(asNumber) >= 1e-4 && Math.abs(asNumber) < 1e7
    ? String(asNumber)
    : precise;
}

export function formatRho(value: number): string {
  return sigFigs(value, 4);
}

export function formatTotal(value: number): string {
  return sigFigs(value, 4);
}
