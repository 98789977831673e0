import { readFileSync } from "fs";
import { parseArgs } from "util";

import { boundChartData, boundCurve, buildBoundOption, checkGrids } from "./bound";
import { parseBoundsCsv, parseSweepCsv, parseVerifyModeCsv } from "./csv";
import { buildSweepOption, SweepMetric, sweepSeries } from "./sweep";
import { HEIGHT, WIDTH, writeChart } from "./render";

function dimension(raw: string | undefined, fallback: number, name: string): number {
  if (raw === undefined) return fallback;
  const value = Number(raw);
  if (!Number.isInteger(value) || value <= 0) {
    throw new Error(`--${name} must be a positive integer, got "${raw}"`);
  }
  return value;
}

function required(value: string | undefined, name: string): string {
  if (value === undefined) {
    throw new Error(`missing required option --${name}`);
  }
  return value;
}

export function runSweep(argv: string[]): number {
  try {
    const { values } = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        metric: { type: "string", default: "normalized_median" },
        "log-y": { type: "boolean", default: false },
        width: { type: "string" },
        height: { type: "string" },
      },
    });
    const metric = values.metric as string;
    if (metric !== "normalized_median" && metric !== "mean_ms") {
      throw new Error(`--metric must be normalized_median or mean_ms, got "${metric}"`);
    }
    const rows = parseSweepCsv(readFileSync(required(values.in, "in"), "utf8"));
    const series = sweepSeries(rows, metric as SweepMetric);
    const out = required(values.out, "out");
    writeChart(
      out,
      buildSweepOption(series, metric as SweepMetric, values["log-y"] as boolean),
      dimension(values.width, WIDTH, "width"),
      dimension(values.height, HEIGHT, "height"),
    );
    console.log(`wrote ${out} (${series.length} series)`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

export function runBound(argv: string[]): number {
  try {
    const { values } = parseArgs({
      args: argv,
      options: {
        trials: { type: "string" },
        bounds: { type: "string" },
        out: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
      },
    });
    const trials = parseVerifyModeCsv(readFileSync(required(values.trials, "trials"), "utf8"));
    const curve = boundCurve(parseBoundsCsv(readFileSync(required(values.bounds, "bounds"), "utf8")));
    checkGrids(trials, curve);
    const out = required(values.out, "out");
    writeChart(
      out,
      buildBoundOption(boundChartData(trials, curve)),
      dimension(values.width, WIDTH, "width"),
      dimension(values.height, HEIGHT, "height"),
    );
    console.log(`wrote ${out} (${trials.length} empirical points)`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}
