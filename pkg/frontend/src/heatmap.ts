// Search-area probability heatmap with the flown path, sensor markers, and
// obstacle mask. North (+y in the world) renders upward.

import { TraceRecord, WorldSnapshot } from './formats';
import { Attrs, el, fmt, svgDocument, text } from './svg';

const CELL = 16;
const MARGIN = 28;
const TITLE_H = 26;

function heatColor(p: number): string {
    // pale amber at p=0 up to deep red at p=1
    const g = Math.round(236 - 176 * p);
    const b = Math.round(214 - 184 * p);
    return `rgb(255,${g},${b})`;
}

export function renderHeatmap(world: WorldSnapshot, trace: TraceRecord[]): string {
    const { width, height } = world;
    const plotW = width * CELL;
    const plotH = height * CELL;
    const docW = plotW + 2 * MARGIN;
    const docH = plotH + 2 * MARGIN + TITLE_H;
    const x0 = MARGIN;
    const y0 = MARGIN + TITLE_H;

    const px = (x: number) => x0 + x * CELL;
    const py = (y: number) => y0 + (height - 1 - y) * CELL;

    const parts: string[] = [];
    parts.push(el('rect', { x: 0, y: 0, width: docW, height: docH, fill: '#ffffff' }));
    parts.push(text(`${world.planner} | ${world.outcome} | ${trace.length} steps`, {
        x: x0, y: MARGIN - 6, 'font-family': 'sans-serif', 'font-size': 14, fill: '#333333',
    }));
    parts.push(el('rect', {
        x: x0, y: y0, width: plotW, height: plotH,
        fill: '#f4f4f4', stroke: '#999999', 'stroke-width': 1,
    }));

    // probability field
    for (const cell of world.area) {
        if (cell.p <= 0) continue;
        parts.push(el('rect', {
            x: px(cell.x), y: py(cell.y), width: CELL, height: CELL,
            fill: heatColor(Math.min(1, cell.p)),
        }));
    }

    // obstacle mask
    for (let y = 0; y < height; y++) {
        const row = world.obstacles[y];
        for (let x = 0; x < width; x++) {
            if (row[x] === '#') {
                parts.push(el('rect', {
                    x: px(x), y: py(y), width: CELL, height: CELL, fill: '#3d3d3d',
                }));
            }
        }
    }

    // flown path, cell centers
    const points = trace
        .map((r) => `${fmt(px(r.x) + CELL / 2)},${fmt(py(r.y) + CELL / 2)}`)
        .join(' ');
    parts.push(el('polyline', {
        points, fill: 'none', stroke: '#1f77b4', 'stroke-width': 2.5,
        'stroke-linejoin': 'round', 'stroke-linecap': 'round', opacity: 0.9,
    }));
    const first = trace[0];
    const last = trace[trace.length - 1];
    parts.push(el('rect', {
        x: px(first.x) + CELL / 4, y: py(first.y) + CELL / 4,
        width: CELL / 2, height: CELL / 2, fill: '#1f77b4',
    }));
    parts.push(el('circle', {
        cx: px(last.x) + CELL / 2, cy: py(last.y) + CELL / 2, r: CELL / 3,
        fill: '#111111',
    }));

    // sensors on top
    for (const s of world.sensors) {
        const attrs: Attrs = {
            cx: px(s.x) + CELL / 2, cy: py(s.y) + CELL / 2, r: fmt(CELL * 0.32),
            fill: s.alerting ? '#d62728' : '#2ca02c',
            stroke: '#ffffff', 'stroke-width': 1.5,
        };
        parts.push(el('circle', attrs));
    }

    return svgDocument(docW, docH, parts);
}
