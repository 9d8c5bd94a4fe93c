/** Dependency-free SVG line charts; one circle per data point. */

export interface Series {
  name: string;
  ys: number[];
  color: string;
}

const WIDTH = 460;
const HEIGHT = 200;
const PAD = 36;

export function lineChartSvg(title: string, xs: number[], series: Series[]): string {
  const allY = series.flatMap((s) => s.ys);
  if (xs.length === 0 || allY.length === 0) {
    return `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}"><text x="12" y="24">${escapeXml(title)}: no data</text></svg>`;
  }
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...allY, 0);
  const yMax = Math.max(...allY);
  const xScale = (x: number) =>
    PAD + (xMax === xMin ? 0.5 : (x - xMin) / (xMax - xMin)) * (WIDTH - 2 * PAD);
  const yScale = (y: number) =>
    HEIGHT - PAD - (yMax === yMin ? 0.5 : (y - yMin) / (yMax - yMin)) * (HEIGHT - 2 * PAD);

  const body = series
    .map((s) => {
      const coords = s.ys.map((y, i) => [xScale(xs[i]), yScale(y)] as const);
      const line = coords.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
      const dots = coords
        .map(
          ([x, y]) =>
            `<circle class="pt" data-series="${escapeXml(s.name)}" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="3" fill="${s.color}"/>`,
        )
        .join("");
      return `<polyline points="${line}" fill="none" stroke="${s.color}" stroke-width="1.5"/>${dots}`;
    })
    .join("");

  const legend = series
    .map(
      (s, i) =>
        `<text x="${PAD + i * 120}" y="${HEIGHT - 8}" fill="${s.color}" font-size="11">${escapeXml(s.name)}</text>`,
    )
    .join("");

  return (
    `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="${escapeXml(title)}">` +
    `<text x="12" y="18" font-size="13" font-weight="bold">${escapeXml(title)}</text>` +
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>` +
    `<line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>` +
    `<text x="${PAD}" y="${HEIGHT - PAD + 14}" font-size="10">${xMin}</text>` +
    `<text x="${WIDTH - PAD - 8}" y="${HEIGHT - PAD + 14}" font-size="10">${xMax}</text>` +
    `<text x="4" y="${yScale(yMax) + 4}" font-size="10">${trim(yMax)}</text>` +
    `<text x="4" y="${yScale(yMin) + 4}" font-size="10">${trim(yMin)}</text>` +
    body +
    legend +
    `</svg>`
  );
}

function trim(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
