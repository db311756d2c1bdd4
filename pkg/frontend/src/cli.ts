#!/usr/bin/env node
// plot heatmap --trace run.jsonl --world world.json --out fig.svg
// plot bars    --csv results.csv --out bars.svg

import * as fs from 'fs';
import { parseArgs } from 'util';

import { aggregateMetrics, renderMetricBars } from './bars';
import { parseMetricsCsv, parseTrace, parseWorld } from './formats';
import { renderHeatmap } from './heatmap';

const USAGE = `usage:
  plot heatmap --trace <run.jsonl> --world <world.json> --out <fig.svg>
  plot bars --csv <results.csv> --out <bars.svg>`;

export function runHeatmap(tracePath: string, worldPath: string, outPath: string): void {
    const trace = parseTrace(fs.readFileSync(tracePath, 'utf8'));
    const world = parseWorld(fs.readFileSync(worldPath, 'utf8'));
    fs.writeFileSync(outPath, renderHeatmap(world, trace));
}

export function runBars(csvPath: string, outPath: string): void {
    const rows = parseMetricsCsv(fs.readFileSync(csvPath, 'utf8'));
    fs.writeFileSync(outPath, renderMetricBars(aggregateMetrics(rows)));
}

export function main(argv: string[]): number {
    const command = argv[0];
    const rest = argv.slice(1);
    try {
        if (command === 'heatmap') {
            const { values } = parseArgs({
                args: rest,
                options: {
                    trace: { type: 'string' },
                    world: { type: 'string' },
                    out: { type: 'string' },
                },
            });
            if (!values.trace || !values.world || !values.out) {
                console.error(USAGE);
                return 2;
            }
            runHeatmap(values.trace, values.world, values.out);
            console.log(`heatmap written to ${values.out}`);
            return 0;
        }
        if (command === 'bars') {
            const { values } = parseArgs({
                args: rest,
                options: {
                    csv: { type: 'string' },
                    out: { type: 'string' },
                },
            });
            if (!values.csv || !values.out) {
                console.error(USAGE);
                return 2;
            }
            runBars(values.csv, values.out);
            console.log(`bar chart written to ${values.out}`);
            return 0;
        }
        console.error(USAGE);
        return 2;
    } catch (e) {
        console.error(`plot ${command}: ${(e as Error).message}`);
        return 1;
    }
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
