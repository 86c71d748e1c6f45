/** Small DOM and SVG helpers; no framework, no client-side math. */

import type { Series } from "./dashboard.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const PALETTE = ["#1665c0", "#c02916", "#168a3c", "#8a6d16", "#6d168a"];

/** Line chart of one or more series on a fixed 0-padded viewport. */
export function lineChart(
  series: Series[],
  width = 420,
  height = 180,
  yMax?: number,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "chart");

  const pad = 28;
  const points = series.flatMap((s) => s.points);
  if (points.length === 0) return svg;
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs, xMin + 1e-9);
  const top = yMax ?? Math.max(...ys, 1e-9);

  const sx = (x: number) => pad + ((x - xMin) / (xMax - xMin)) * (width - 2 * pad);
  const sy = (y: number) => height - pad - (y / top) * (height - 2 * pad);

  const axis = document.createElementNS(SVG_NS, "path");
  axis.setAttribute(
    "d",
    `M ${pad} ${pad} L ${pad} ${height - pad} L ${width - pad} ${height - pad}`,
  );
  axis.setAttribute("stroke", "#999");
  axis.setAttribute("fill", "none");
  svg.append(axis);

  series.forEach((s, index) => {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      s.points.map(([x, y]) => `${sx(x)},${sy(y)}`).join(" "),
    );
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", PALETTE[index % PALETTE.length] ?? "#000");
    line.setAttribute("stroke-width", "1.5");
    svg.append(line);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(pad + 4));
    label.setAttribute("y", String(pad + 12 * (index + 1)));
    label.setAttribute("fill", PALETTE[index % PALETTE.length] ?? "#000");
    label.setAttribute("font-size", "10");
    label.textContent = s.name;
    svg.append(label);
  });
  return svg;
}
