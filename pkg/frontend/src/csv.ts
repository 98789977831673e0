import Papa from "papaparse";

/** Raised for any malformed input file; the CLI turns it into exit code 1. */
export class CsvError extends Error {}

export interface SweepRow {
  scenario: string;
  rho_over_rmax: number;
  trials: number;
  success_rate: number;
  median_samples: number;
  mean_ms: number;
  normalized_median: number;
}

export interface VerifyModeRow {
  n_sigma: number;
  trials: number;
  failures: number;
  empirical: number;
  bound: number;
  sigma: number;
  violation: boolean;
}

export interface BoundRow {
  bound_name: string;
  N_P: number;
  N_sigma: number;
  value: number;
}

export const SWEEP_HEADER = [
  "scenario",
  "rho_over_rmax",
  "trials",
  "success_rate",
  "median_samples",
  "mean_ms",
  "normalized_median",
];
export const VERIFY_MODE_HEADER = [
  "n_sigma",
  "trials",
  "failures",
  "empirical",
  "bound",
  "sigma",
  "violation",
];
export const BOUNDS_HEADER = ["bound_name", "N_P", "N_sigma", "value"];

function parseRows(text: string, expected: string[], what: string): Record<string, string>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  if (fields.join(",") !== expected.join(",")) {
    throw new CsvError(
      `${what}: header mismatch, expected "${expected.join(",")}" got "${fields.join(",")}"`,
    );
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${what}: no data rows`);
  }
  return parsed.data;
}

function num(row: Record<string, string>, column: string, what: string, line: number): number {
  const raw = row[column];
  const value = raw === "" || raw === undefined ? NaN : Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvError(`${what}: non-numeric value "${raw}" in column ${column}, data row ${line}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const what = "sweep summary CSV";
  return parseRows(text, SWEEP_HEADER, what).map((row, i) => ({
    scenario: row.scenario,
    rho_over_rmax: num(row, "rho_over_rmax", what, i + 1),
    trials: num(row, "trials", what, i + 1),
    success_rate: num(row, "success_rate", what, i + 1),
    median_samples: num(row, "median_samples", what, i + 1),
    mean_ms: num(row, "mean_ms", what, i + 1),
    normalized_median: num(row, "normalized_median", what, i + 1),
  }));
}

export function parseVerifyModeCsv(text: string): VerifyModeRow[] {
  const what = "bound verification CSV";
  return parseRows(text, VERIFY_MODE_HEADER, what).map((row, i) => ({
    n_sigma: num(row, "n_sigma", what, i + 1),
    trials: num(row, "trials", what, i + 1),
    failures: num(row, "failures", what, i + 1),
    empirical: num(row, "empirical", what, i + 1),
    bound: num(row, "bound", what, i + 1),
    sigma: num(row, "sigma", what, i + 1),
    violation: num(row, "violation", what, i + 1) !== 0,
  }));
}

export function parseBoundsCsv(text: string): BoundRow[] {
  const what = "bounds table CSV";
  return parseRows(text, BOUNDS_HEADER, what).map((row, i) => ({
    bound_name: row.bound_name,
    N_P: num(row, "N_P", what, i + 1),
    N_sigma: num(row, "N_sigma", what, i + 1),
    value: num(row, "value", what, i + 1),
  }));
}
