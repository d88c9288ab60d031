/** Dependency-free SVG chart builders (layout only; values arrive as-is). */

export interface ChartPoint {
  label: string;
  value: number;
}

const WIDTH = 640;
const HEIGHT = 220;
const PAD = 28;

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Vertical bars, one per point; used for per-site rank differences. */
export function barChartSvg(points: ChartPoint[], title = ""): string {
  if (points.length === 0) {
    return `<svg class="chart chart-bar" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img"></svg>`;
  }
  const max = Math.max(...points.map((p) => p.value), 1);
  const slot = (WIDTH - 2 * PAD) / points.length;
  const barWidth = Math.max(4, slot * 0.6);
  const parts: string[] = [];
  points.forEach((point, index) => {
    const height = ((HEIGHT - 2 * PAD) * point.value) / max;
    const x = PAD + index * slot + (slot - barWidth) / 2;
    const y = HEIGHT - PAD - height;
    parts.push(
      `<rect class="bar" data-label="${escapeXml(point.label)}" data-value="${point.value}" ` +
        `x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${barWidth.toFixed(1)}" height="${height.toFixed(1)}"></rect>`,
    );
    parts.push(
      `<text class="bar-label" x="${(x + barWidth / 2).toFixed(1)}" y="${HEIGHT - PAD / 3}" text-anchor="middle">` +
        `${escapeXml(point.label)}</text>`,
    );
  });
  const caption = title ? `<text class="chart-title" x="${PAD}" y="${PAD / 1.5}">${escapeXml(title)}</text>` : "";
  return (
    `<svg class="chart chart-bar" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">` +
    `${caption}<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"></line>` +
    parts.join("") +
    `</svg>`
  );
}

/** Connected line, one point per run; used for mean rank difference trends. */
export function lineChartSvg(points: ChartPoint[], title = ""): string {
  if (points.length === 0) {
    return `<svg class="chart chart-line" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img"></svg>`;
  }
  const max = Math.max(...points.map((p) => p.value), 1);
  const step = points.length > 1 ? (WIDTH - 2 * PAD) / (points.length - 1) : 0;
  const coords = points.map((point, index) => {
    const x = PAD + index * step;
    const y = HEIGHT - PAD - ((HEIGHT - 2 * PAD) * point.value) / max;
    return { x, y, point };
  });
  const path = coords
    .map(({ x, y }, index) => `${index === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`)
    .join(" ");
  const markers = coords
    .map(
      ({ x, y, point }) =>
        `<circle class="dot" data-label="${escapeXml(point.label)}" data-value="${point.value}" ` +
        `cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="4"></circle>` +
        `<text class="dot-label" x="${x.toFixed(1)}" y="${HEIGHT - PAD / 3}" text-anchor="middle">${escapeXml(point.label)}</text>`,
    )
    .join("");
  const caption = title ? `<text class="chart-title" x="${PAD}" y="${PAD / 1.5}">${escapeXml(title)}</text>` : "";
  return (
    `<svg class="chart chart-line" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">` +
    `${caption}<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"></line>` +
    `<path class="line" d="${path}" fill="none"></path>` +
    markers +
    `</svg>`
  );
}
