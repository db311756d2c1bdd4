import { describe, expect, it } from 'vitest';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';

import { parseTrace, parseWorld } from '../src/formats';
import { renderHeatmap } from '../src/heatmap';
import { runHeatmap } from '../src/cli';

const FIXTURES = path.join(__dirname, '..', 'fixtures');
const read = (name: string) => fs.readFileSync(path.join(FIXTURES, name), 'utf8');

describe('renderHeatmap', () => {
    it('matches the golden file byte for byte', () => {
        const svg = renderHeatmap(parseWorld(read('world.json')), parseTrace(read('trace.jsonl')));
        expect(svg).toBe(read('golden_heatmap.svg'));
    });

    it('renders sensors, obstacles, and the path', () => {
        const world = parseWorld(read('world.json'));
        const svg = renderHeatmap(world, parseTrace(read('trace.jsonl')));
        expect(svg).toContain('<polyline');
        expect((svg.match(/<circle/g) ?? []).length).toBeGreaterThanOrEqual(world.sensors.length);
        expect(svg).toContain('#3d3d3d'); // obstacle fill
        expect(svg).toContain('#d62728'); // alerting sensor
    });

    it('draws a uniform background with just the path when the area is empty', () => {
        const world = parseWorld(read('world.json'));
        world.area = [];
        const short = parseTrace(read('trace.jsonl')).slice(0, 5);
        const svg = renderHeatmap(world, short);
        expect(svg.length).toBeGreaterThan(0);
        expect(svg).not.toContain('rgb(255,60,30)');
        expect(svg).toContain('<polyline');
    });

    it('is idempotent and never mutates its inputs', () => {
        const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'heatmap-'));
        const out = path.join(tmp, 'fig.svg');
        const tracePath = path.join(FIXTURES, 'trace.jsonl');
        const worldPath = path.join(FIXTURES, 'world.json');
        const before = [fs.readFileSync(tracePath), fs.readFileSync(worldPath)];
        runHeatmap(tracePath, worldPath, out);
        const first = fs.readFileSync(out, 'utf8');
        runHeatmap(tracePath, worldPath, out);
        expect(fs.readFileSync(out, 'utf8')).toBe(first);
        expect(fs.readFileSync(tracePath).equals(before[0])).toBe(true);
        expect(fs.readFileSync(worldPath).equals(before[1])).toBe(true);
    });

    it('propagates line-numbered trace errors', () => {
        const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'heatmap-'));
        const badTrace = path.join(tmp, 'bad.jsonl');
        fs.writeFileSync(badTrace, '{"t":0,"x":1,"y":0,"obs":"clear","area_n":1,"area_max_p":1,"event":""}\n{broken\n');
        expect(() => runHeatmap(badTrace, path.join(FIXTURES, 'world.json'),
            path.join(tmp, 'out.svg'))).toThrow(/trace line 2/);
    });
});
