// Parsers for the simulator's published file formats: run traces (JSON
// lines), world snapshots (JSON), and the metrics CSV.

export interface TraceRecord {
    t: number;
    x: number;
    y: number;
    obs: string;
    area_n: number;
    area_max_p: number;
    event: string;
}

export interface SensorMarker {
    id: number;
    x: number;
    y: number;
    alerting: boolean;
}

export interface AreaCell {
    x: number;
    y: number;
    p: number;
}

export interface WorldSnapshot {
    width: number;
    height: number;
    legend: Record<string, string>;
    rows: string[];
    obstacles: string[];
    sensors: SensorMarker[];
    wind: { dx: number; dy: number; delta: number; mu: number };
    area: AreaCell[];
    start: { x: number; y: number };
    planner: string;
    outcome: string;
}

export interface MetricsRow {
    planner: string;
    fire: number;
    start_x: number;
    start_y: number;
    outcome: string;
    ttv_total: number | null;
    ttl_total: number | null;
    ttv_sa: number | null;
    ttl_sa: number | null;
    nontrivial_v: boolean | null;
    nontrivial_l: boolean | null;
    compute_ms: number | null;
}

export const METRICS_COLUMNS = [
    'planner', 'fire', 'start_x', 'start_y', 'outcome',
    'ttv_total', 'ttl_total', 'ttv_sa', 'ttl_sa',
    'nontrivial_v', 'nontrivial_l', 'compute_ms',
] as const;

const TRACE_KEYS = ['t', 'x', 'y', 'obs', 'area_n', 'area_max_p', 'event'];
const OBS_VALUES = new Set(['clear', 'burning', 'burned', 'smoke']);

export function parseTrace(text: string): TraceRecord[] {
    const records: TraceRecord[] = [];
    const lines = text.split('\n');
    for (let i = 0; i < lines.length; i++) {
        const line = lines[i].trim();
        if (line === '') continue;
        let obj: any;
        try {
            obj = JSON.parse(line);
        } catch (e) {
            throw new Error(`trace line ${i + 1}: not valid JSON (${(e as Error).message})`);
        }
        for (const key of TRACE_KEYS) {
            if (!(key in obj)) {
                throw new Error(`trace line ${i + 1}: missing key "${key}"`);
            }
        }
        if (typeof obj.t !== 'number' || typeof obj.x !== 'number' || typeof obj.y !== 'number') {
            throw new Error(`trace line ${i + 1}: t/x/y must be numbers`);
        }
        if (!OBS_VALUES.has(obj.obs)) {
            throw new Error(`trace line ${i + 1}: unknown obs "${obj.obs}"`);
        }
        records.push(obj as TraceRecord);
    }
    if (records.length === 0) {
        throw new Error('trace is empty');
    }
    return records;
}

export function parseWorld(text: string): WorldSnapshot {
    let obj: any;
    try {
        obj = JSON.parse(text);
    } catch (e) {
        throw new Error(`world snapshot: not valid JSON (${(e as Error).message})`);
    }
    for (const key of ['width', 'height', 'rows', 'obstacles', 'sensors', 'area', 'start']) {
        if (!(key in obj)) throw new Error(`world snapshot: missing key "${key}"`);
    }
    const w = obj.width, h = obj.height;
    if (obj.rows.length !== h || obj.obstacles.length !== h) {
        throw new Error(`world snapshot: expected ${h} rows, got ${obj.rows.length}`);
    }
    for (const row of obj.rows) {
        if (typeof row !== 'string' || row.length !== w) {
            throw new Error(`world snapshot: every state row must have length ${w}`);
        }
    }
    return obj as WorldSnapshot;
}

function parseOptionalNumber(field: string, raw: string, line: number): number | null {
    if (raw === '') return null;
    const value = Number(raw);
    if (Number.isNaN(value)) {
        throw new Error(`metrics CSV line ${line}: ${field} is not a number: "${raw}"`);
    }
    return value;
}

function parseOptionalBool(field: string, raw: string, line: number): boolean | null {
    if (raw === '') return null;
    if (raw !== 'true' && raw !== 'false') {
        throw new Error(`metrics CSV line ${line}: ${field} must be true/false: "${raw}"`);
    }
    return raw === 'true';
}

export function parseMetricsCsv(text: string): MetricsRow[] {
    const lines = text.split('\n').filter((l) => l.trim() !== '');
    if (lines.length === 0) {
        throw new Error('metrics CSV is empty');
    }
    const header = lines[0].split(',');
    const missing = METRICS_COLUMNS.filter((c) => !header.includes(c));
    if (missing.length > 0) {
        throw new Error(`metrics CSV missing columns: ${missing.join(', ')}`);
    }
    const index = new Map(header.map((name, i) => [name, i]));
    const rows: MetricsRow[] = [];
    for (let i = 1; i < lines.length; i++) {
        const parts = lines[i].split(',');
        if (parts.length !== header.length) {
            throw new Error(`metrics CSV line ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
        }
        const get = (name: string) => parts[index.get(name)!];
        rows.push({
            planner: get('planner'),
            fire: Number(get('fire')),
            start_x: Number(get('start_x')),
            start_y: Number(get('start_y')),
            outcome: get('outcome'),
            ttv_total: parseOptionalNumber('ttv_total', get('ttv_total'), i + 1),
            ttl_total: parseOptionalNumber('ttl_total', get('ttl_total'), i + 1),
            ttv_sa: parseOptionalNumber('ttv_sa', get('ttv_sa'), i + 1),
            ttl_sa: parseOptionalNumber('ttl_sa', get('ttl_sa'), i + 1),
            nontrivial_v: parseOptionalBool('nontrivial_v', get('nontrivial_v'), i + 1),
            nontrivial_l: parseOptionalBool('nontrivial_l', get('nontrivial_l'), i + 1),
            compute_ms: parseOptionalNumber('compute_ms', get('compute_ms'), i + 1),
        });
    }
    if (rows.length === 0) {
        throw new Error('metrics CSV has no data rows');
    }
    return rows;
}
