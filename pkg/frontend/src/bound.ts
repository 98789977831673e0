import type { EChartsOption } from "echarts";

import { BoundRow, CsvError, VerifyModeRow } from "./csv";

/** Analytic placement-coverage curve: [N_sigma, bound], sorted by N_sigma.
 *
 * The bounds table repeats the mode_failure value across its N_P grid; the
 * duplicates must agree since the bound does not depend on N_P. */
export function boundCurve(rows: BoundRow[]): [number, number][] {
  const byNSigma = new Map<number, number>();
  for (const row of rows) {
    if (row.bound_name !== "mode_failure") continue;
    const seen = byNSigma.get(row.N_sigma);
    if (seen !== undefined && Math.abs(seen - row.value) > 1e-12 * Math.max(seen, row.value)) {
      throw new CsvError(
        `bounds table CSV: mode_failure disagrees with itself at N_sigma=${row.N_sigma} ` +
          `(${seen} vs ${row.value})`,
      );
    }
    byNSigma.set(row.N_sigma, row.value);
  }
  if (byNSigma.size === 0) {
    throw new CsvError("bounds table CSV: no mode_failure rows");
  }
  return [...byNSigma.entries()].sort((a, b) => a[0] - b[0]);
}

export function checkGrids(trials: VerifyModeRow[], curve: [number, number][]): void {
  const grid = new Set(curve.map(([n]) => n));
  for (const row of trials) {
    if (!grid.has(row.n_sigma)) {
      throw new CsvError(
        `N_sigma grid mismatch: verification has N_sigma=${row.n_sigma}, ` +
          `bounds table only {${[...grid].sort((a, b) => a - b).join(", ")}}`,
      );
    }
  }
}

export interface BoundChartData {
  /** [N_sigma, y, whisker low, whisker high] with zeros lifted to the floor. */
  points: [number, number, number, number][];
  curve: [number, number][];
  /** Smallest positive plotted value / 2; log axes cannot show 0. */
  floor: number;
}

/** Empirical failure frequencies with 3-sigma binomial whiskers, prepared
 * for a log y axis: values at 0 are drawn at a floor under the smallest
 * positive value, whiskers are clamped to [floor, 1]. */
export function boundChartData(
  trials: VerifyModeRow[],
  curve: [number, number][],
): BoundChartData {
  const positive = curve.map(([, v]) => v).filter((v) => v > 0);
  for (const row of trials) {
    if (row.empirical > 0) positive.push(row.empirical);
    if (row.empirical - 3 * row.sigma > 0) positive.push(row.empirical - 3 * row.sigma);
  }
  const floor = Math.min(...positive) / 2;
  const points = trials
    .slice()
    .sort((a, b) => a.n_sigma - b.n_sigma)
    .map(
      (row): [number, number, number, number] => [
        row.n_sigma,
        Math.max(row.empirical, floor),
        Math.max(row.empirical - 3 * row.sigma, floor),
        Math.min(Math.max(row.empirical + 3 * row.sigma, floor), 1),
      ],
    );
  return { points, curve, floor };
}

const POINT_COLOR = "#5470c6";
const CURVE_COLOR = "#ee6666";

export function buildBoundOption(data: BoundChartData): EChartsOption {
  const whiskerHalfWidth = 5;
  return {
    animation: false,
    title: { text: "coverage failure: empirical vs bound", left: "center" },
    legend: { data: ["empirical", "bound"], bottom: 0 },
    grid: { left: 80, right: 30, top: 50, bottom: 60 },
    xAxis: {
      type: "value",
      name: "N_sigma",
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: "log",
      name: "failure probability",
      nameLocation: "middle",
      nameGap: 58,
      min: data.floor,
      max: 1,
    },
    series: [
      {
        type: "line",
        name: "bound",
        data: data.curve,
        color: CURVE_COLOR,
        symbolSize: 5,
      },
      {
        type: "scatter",
        name: "empirical",
        data: data.points.map(([x, y]) => [x, y]),
        color: POINT_COLOR,
        symbolSize: 9,
      },
      {
        type: "custom",
        name: "empirical spread",
        data: data.points,
        color: POINT_COLOR,
        renderItem: (params: any, api: any) => {
          const x = api.value(0) as number;
          const low = api.coord([x, api.value(2)]);
          const high = api.coord([x, api.value(3)]);
          const style = { stroke: POINT_COLOR, fill: null as unknown as string, lineWidth: 1.5 };
          return {
            type: "group",
            children: [
              {
                type: "line",
                shape: { x1: low[0], y1: low[1], x2: high[0], y2: high[1] },
                style,
              },
              {
                type: "line",
                shape: {
                  x1: low[0] - whiskerHalfWidth,
                  y1: low[1],
                  x2: low[0] + whiskerHalfWidth,
                  y2: low[1],
                },
                style,
              },
              {
                type: "line",
                shape: {
                  x1: high[0] - whiskerHalfWidth,
                  y1: high[1],
                  x2: high[0] + whiskerHalfWidth,
                  y2: high[1],
                },
                style,
              },
            ],
          };
        },
      },
    ],
  };
}
