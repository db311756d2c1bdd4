// Per-planner mean time metrics as grouped bars, mirroring the benchmark
// summary tables: TtL and TtV, each total / non-trivial / search-area.

import { MetricsRow } from './formats';
import { el, fmt, svgDocument, text } from './svg';

export interface PlannerMeans {
    planner: string;
    runs: number;
    ttlTotal: number | null;
    ttlNontrivial: number | null;
    ttlSearchArea: number | null;
    ttvTotal: number | null;
    ttvNontrivial: number | null;
    ttvSearchArea: number | null;
}

function mean(values: number[]): number | null {
    if (values.length === 0) return null;
    return values.reduce((a, b) => a + b, 0) / values.length;
}

export function aggregateMetrics(rows: MetricsRow[]): PlannerMeans[] {
    const byPlanner = new Map<string, MetricsRow[]>();
    for (const row of rows) {
        if (row.outcome === 'failed') continue;
        const bucket = byPlanner.get(row.planner) ?? [];
        bucket.push(row);
        byPlanner.set(row.planner, bucket);
    }
    const out: PlannerMeans[] = [];
    for (const planner of [...byPlanner.keys()].sort()) {
        const rs = byPlanner.get(planner)!;
        const ttl = rs.filter((r) => r.ttl_total !== null).map((r) => r.ttl_total!);
        const ttlNt = rs.filter((r) => r.ttl_total !== null && r.nontrivial_l === true)
            .map((r) => r.ttl_total!);
        const ttv = rs.filter((r) => r.ttv_total !== null).map((r) => r.ttv_total!);
        const ttvNt = rs.filter((r) => r.ttv_total !== null && r.nontrivial_v === true)
            .map((r) => r.ttv_total!);
        out.push({
            planner,
            runs: rs.length,
            ttlTotal: mean(ttl),
            ttlNontrivial: mean(ttlNt),
            ttlSearchArea: mean(rs.filter((r) => r.ttl_sa !== null).map((r) => r.ttl_sa!)),
            ttvTotal: mean(ttv),
            ttvNontrivial: mean(ttvNt),
            ttvSearchArea: mean(rs.filter((r) => r.ttv_sa !== null).map((r) => r.ttv_sa!)),
        });
    }
    return out;
}

const GROUPS: Array<[string, keyof PlannerMeans]> = [
    ['TtL total', 'ttlTotal'],
    ['TtL non-trivial', 'ttlNontrivial'],
    ['TtL search area', 'ttlSearchArea'],
    ['TtV total', 'ttvTotal'],
    ['TtV non-trivial', 'ttvNontrivial'],
    ['TtV search area', 'ttvSearchArea'],
];

const PLANNER_COLORS: Record<string, string> = {
    'fire-gipp': '#1f77b4',
    'tsp-cp': '#ff7f0e',
    'tsp-sensor': '#2ca02c',
};

const BAR_W = 34;
const BAR_GAP = 6;
const GROUP_GAP = 40;
const PLOT_H = 260;
const MARGIN = 48;
const LEGEND_H = 30;

export function renderMetricBars(summaries: PlannerMeans[]): string {
    if (summaries.length === 0) {
        throw new Error('no planner rows to plot');
    }
    const n = summaries.length;
    const groupW = n * BAR_W + (n - 1) * BAR_GAP;
    const plotW = GROUPS.length * groupW + (GROUPS.length - 1) * GROUP_GAP;
    const docW = plotW + 2 * MARGIN;
    const docH = PLOT_H + 2 * MARGIN + LEGEND_H + 20;
    const baseY = MARGIN + LEGEND_H + PLOT_H;

    const values = summaries.flatMap((s) =>
        GROUPS.map(([, key]) => s[key] as number | null).filter((v): v is number => v !== null));
    const maxValue = Math.max(...values, 1e-9);
    const scale = PLOT_H / (maxValue * 1.15);

    const parts: string[] = [];
    parts.push(el('rect', { x: 0, y: 0, width: docW, height: docH, fill: '#ffffff' }));

    // legend
    summaries.forEach((s, i) => {
        const lx = MARGIN + i * 150;
        parts.push(el('rect', {
            x: lx, y: MARGIN - 10, width: 14, height: 14,
            fill: PLANNER_COLORS[s.planner] ?? '#7f7f7f',
        }));
        parts.push(text(`${s.planner} (${s.runs} runs)`, {
            x: lx + 20, y: MARGIN + 2, 'font-family': 'sans-serif', 'font-size': 12,
            fill: '#333333',
        }));
    });

    parts.push(el('line', {
        x1: MARGIN, y1: baseY, x2: MARGIN + plotW, y2: baseY,
        stroke: '#333333', 'stroke-width': 1,
    }));

    GROUPS.forEach(([label, key], gi) => {
        const gx = MARGIN + gi * (groupW + GROUP_GAP);
        summaries.forEach((s, si) => {
            const v = s[key] as number | null;
            const bx = gx + si * (BAR_W + BAR_GAP);
            if (v === null) {
                parts.push(text('N/A', {
                    x: fmt(bx + BAR_W / 2), y: fmt(baseY - 6), 'font-family': 'sans-serif',
                    'font-size': 10, fill: '#999999', 'text-anchor': 'middle',
                }));
                return;
            }
            const barH = v * scale;
            parts.push(el('rect', {
                x: bx, y: fmt(baseY - barH), width: BAR_W, height: fmt(barH),
                fill: PLANNER_COLORS[s.planner] ?? '#7f7f7f',
            }));
            parts.push(text(v.toFixed(2), {
                x: fmt(bx + BAR_W / 2), y: fmt(baseY - barH - 4), 'font-family': 'sans-serif',
                'font-size': 10, fill: '#333333', 'text-anchor': 'middle',
            }));
        });
        parts.push(text(label, {
            x: fmt(gx + groupW / 2), y: baseY + 16, 'font-family': 'sans-serif',
            'font-size': 11, fill: '#333333', 'text-anchor': 'middle',
        }));
    });

    return svgDocument(docW, docH, parts);
}
