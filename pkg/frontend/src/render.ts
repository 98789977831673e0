import { writeFileSync } from "fs";

import { Resvg } from "@resvg/resvg-js";
import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export const WIDTH = 900;
export const HEIGHT = 600;

/** Server-side render to a static SVG string; pure function of the option. */
export function renderSvg(option: EChartsOption, width = WIDTH, height = HEIGHT): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  chart.setOption(option);
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

/** Write the chart to `path`: SVG text for .svg, rasterized PNG otherwise. */
export function writeChart(path: string, option: EChartsOption, width = WIDTH, height = HEIGHT): void {
  const svg = renderSvg(option, width, height);
  if (path.toLowerCase().endsWith(".svg")) {
    writeFileSync(path, svg);
    return;
  }
  writeFileSync(path, new Resvg(svg).render().asPng());
}
