import type { EChartsOption } from "echarts";

import { CsvError, SweepRow } from "./csv";

export type SweepMetric = "normalized_median" | "mean_ms";

export interface SweepSeries {
  name: string;
  /** [rho/R_max, metric / per-series minimum], sorted by x. */
  points: [number, number][];
}

/** One series per scenario, each scaled so its cheapest point sits at 1.0. */
export function sweepSeries(rows: SweepRow[], metric: SweepMetric): SweepSeries[] {
  const byScenario = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const group = byScenario.get(row.scenario);
    if (group) {
      group.push(row);
    } else {
      byScenario.set(row.scenario, [row]);
    }
  }
  const series: SweepSeries[] = [];
  for (const [name, group] of byScenario) {
    group.sort((a, b) => a.rho_over_rmax - b.rho_over_rmax);
    const min = Math.min(...group.map((r) => r[metric]));
    if (!(min > 0)) {
      throw new CsvError(
        `metric ${metric} has minimum ${min} in series "${name}"; cannot scale its minimum to 1`,
      );
    }
    series.push({ name, points: group.map((r) => [r.rho_over_rmax, r[metric] / min]) });
  }
  return series;
}

const METRIC_LABEL: Record<SweepMetric, string> = {
  normalized_median: "median samples to success (scaled, min = 1)",
  mean_ms: "mean wall time (scaled, min = 1)",
};

export function buildSweepOption(
  series: SweepSeries[],
  metric: SweepMetric,
  logY: boolean,
): EChartsOption {
  return {
    animation: false,
    title: { text: "planner cost vs placement radius", left: "center" },
    legend: { data: series.map((s) => s.name), bottom: 0 },
    grid: { left: 70, right: 30, top: 50, bottom: 60 },
    xAxis: {
      type: "value",
      name: "rho / R_max",
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: logY ? "log" : "value",
      name: METRIC_LABEL[metric],
      nameLocation: "middle",
      nameGap: 48,
    },
    series: series.map((s) => ({
      type: "line",
      name: s.name,
      data: s.points,
      symbolSize: 7,
    })),
  };
}
