// Minimal deterministic SVG string builder. Attribute order follows the
// insertion order of the attrs object, so output bytes are stable.

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs, children?: string[]): string {
    const parts = Object.entries(attrs).map(([k, v]) => `${k}="${v}"`);
    const open = parts.length > 0 ? `<${tag} ${parts.join(' ')}` : `<${tag}`;
    if (children === undefined || children.length === 0) {
        return `${open}/>`;
    }
    return `${open}>${children.join('')}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
    const parts = Object.entries(attrs).map(([k, v]) => `${k}="${v}"`);
    return `<text ${parts.join(' ')}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
    return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function svgDocument(width: number, height: number, children: string[]): string {
    const body = children.join('\n');
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n${body}\n</svg>\n`;
}

// Fixed-precision number for coordinates so output never depends on float noise.
export function fmt(n: number): string {
    const rounded = n.toFixed(2);
    return rounded.endsWith('.00') ? rounded.slice(0, -3) : rounded;
}
