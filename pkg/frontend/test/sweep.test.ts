import { describe, expect, it } from "vitest";

import { CsvError, SweepRow } from "../src/csv";
import { buildSweepOption, sweepSeries } from "../src/sweep";

function row(scenario: string, rho: number, median: number, ms = 10): SweepRow {
  return {
    scenario,
    rho_over_rmax: rho,
    trials: 5,
    success_rate: 1,
    median_samples: median,
    mean_ms: ms,
    normalized_median: 1,
  };
}

describe("sweepSeries", () => {
  it("groups by scenario and sorts each series by rho", () => {
    const rows = [row("b", 4, 30), row("a", 2, 10), row("b", 1, 15), row("a", 8, 40)];
    const series = sweepSeries(rows, "median_samples" as any);
    expect(series.map((s) => s.name)).toEqual(["b", "a"]);
    expect(series[0].points.map(([x]) => x)).toEqual([1, 4]);
    expect(series[1].points.map(([x]) => x)).toEqual([2, 8]);
  });

  it("scales every series so its minimum is exactly 1", () => {
    const rows = [row("a", 1, 0, 12), row("a", 2, 0, 30), row("a", 4, 0, 18)];
    const series = sweepSeries(rows, "mean_ms");
    const ys = series[0].points.map(([, y]) => y);
    expect(Math.min(...ys)).toBe(1);
    expect(ys).toEqual([1, 30 / 12, 18 / 12]);
  });

  it("keeps an already normalized metric unchanged", () => {
    const rows = [
      { ...row("a", 1, 0), normalized_median: 1 },
      { ...row("a", 2, 0), normalized_median: 2.5 },
    ];
    const series = sweepSeries(rows, "normalized_median");
    expect(series[0].points.map(([, y]) => y)).toEqual([1, 2.5]);
  });

  it("a single-point series is flat at 1", () => {
    const series = sweepSeries([row("only", 2, 123)], "normalized_median");
    expect(series[0].points).toEqual([[2, 1]]);
  });

  it("refuses to scale an all-zero metric", () => {
    const rows = [row("a", 1, 5, 0), row("a", 2, 6, 0)];
    expect(() => sweepSeries(rows, "mean_ms")).toThrow(CsvError);
    expect(() => sweepSeries(rows, "mean_ms")).toThrow(/mean_ms/);
  });
});

describe("buildSweepOption", () => {
  it("one line series per scenario, legend labels from the data", () => {
    const series = sweepSeries(
      [row("a", 1, 10), row("b", 1, 20), row("c", 1, 30)],
      "normalized_median",
    );
    const option = buildSweepOption(series, "normalized_median", false);
    expect((option.series as any[]).length).toBe(3);
    expect((option.series as any[]).every((s) => s.type === "line")).toBe(true);
    expect((option.legend as any).data).toEqual(["a", "b", "c"]);
    expect((option.yAxis as any).type).toBe("value");
  });

  it("the log flag switches the y axis", () => {
    const series = sweepSeries([row("a", 1, 10)], "normalized_median");
    const option = buildSweepOption(series, "normalized_median", true);
    expect((option.yAxis as any).type).toBe("log");
  });
});
