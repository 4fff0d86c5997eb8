/**
 * Eval dashboard data: parse the harness CSV and build a grouped bar chart
 * (mean WER and intent accuracy per condition) as an SVG string. Bars carry
 * data-value attributes so views and tests can read back exactly what was
 * plotted.
 */

export interface EvalRow {
  condition: string;
  p_sub: number;
  p_del: number;
  p_ins: number;
  filler_rate: number;
  n: number;
  mean_wer: number;
  intent_accuracy: number;
  repair_recovery: number;
}

export class CsvError extends Error {}

const EXPECTED_HEADER =
  "condition,p_sub,p_del,p_ins,filler_rate,n,mean_wer,intent_accuracy,repair_recovery";

export function parseEvalCsv(text: string): EvalRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  if (lines[0] !== EXPECTED_HEADER) {
    throw new CsvError(`unexpected header: ${lines[0]}`);
  }
  const rows: EvalRow[] = [];
  for (const [index, line] of lines.slice(1).entries()) {
    const cells = line.split(",");
    if (cells.length !== 9) {
      throw new CsvError(`row ${index + 2}: expected 9 cells, got ${cells.length}`);
    }
    const numbers = cells.slice(1).map(Number);
    if (numbers.some((v) => Number.isNaN(v))) {
      throw new CsvError(`row ${index + 2}: non-numeric cell`);
    }
    rows.push({
      condition: cells[0],
      p_sub: numbers[0],
      p_del: numbers[1],
      p_ins: numbers[2],
      filler_rate: numbers[3],
      n: numbers[4],
      mean_wer: numbers[5],
      intent_accuracy: numbers[6],
      repair_recovery: numbers[7],
    });
  }
  return rows;
}

export interface Bar {
  series: string;
  value: number;
}

export interface BarGroup {
  label: string;
  bars: Bar[];
}

export const CHART_SERIES: Array<{ name: string; key: keyof EvalRow; color: string }> = [
  { name: "mean_wer", key: "mean_wer", color: "#e4572e" },
  { name: "intent_accuracy", key: "intent_accuracy", color: "#2e86ab" },
];

export function chartGroups(rows: EvalRow[]): BarGroup[] {
  return rows.map((row) => ({
    label: row.condition,
    bars: CHART_SERIES.map((s) => ({ series: s.name, value: row[s.key] as number })),
  }));
}

/** Grouped bar chart; values are recoverable from rect data-* attributes. */
export function renderBarChartSvg(groups: BarGroup[], width = 640, height = 260): string {
  if (groups.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="12" y="24">no data</text></svg>`;
  }
  const margin = { top: 16, right: 12, bottom: 36, left: 40 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const maxValue = Math.max(
    1, // accuracy axis is 0..1; WER may exceed it
    ...groups.flatMap((g) => g.bars.map((b) => b.value)),
  );
  const groupW = plotW / groups.length;
  const barW = (groupW * 0.7) / CHART_SERIES.length;
  const colorOf = new Map(CHART_SERIES.map((s) => [s.name, s.color]));

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" role="img">`,
  ];
  for (const tick of [0, 0.25, 0.5, 0.75, 1.0]) {
    const y = margin.top + plotH - (tick / maxValue) * plotH;
    parts.push(
      `<line x1="${margin.left}" y1="${y.toFixed(1)}" x2="${width - margin.right}" ` +
        `y2="${y.toFixed(1)}" stroke="#ddd"/>`,
      `<text x="4" y="${(y + 4).toFixed(1)}" font-size="10">${tick}</text>`,
    );
  }
  groups.forEach((group, gi) => {
    const x0 = margin.left + gi * groupW + groupW * 0.15;
    group.bars.forEach((bar, bi) => {
      const h = (bar.value / maxValue) * plotH;
      const x = x0 + bi * barW;
      const y = margin.top + plotH - h;
      parts.push(
        `<rect data-condition="${group.label}" data-series="${bar.series}" ` +
          `data-value="${bar.value}" x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
          `width="${(barW * 0.9).toFixed(1)}" height="${h.toFixed(1)}" ` +
          `fill="${colorOf.get(bar.series)}"/>`,
      );
    });
    parts.push(
      `<text x="${(x0 + (groupW * 0.7) / 2).toFixed(1)}" y="${height - 14}" ` +
        `font-size="10" text-anchor="middle">${group.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
