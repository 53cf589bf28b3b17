/** Client-side rendering of the token graph.
 *
 * The service emits a small, regular DOT document (one node line per
 * token, one undirected edge line per merged edge). Parsing that shape
 * directly keeps the page dependency-free; the layout is a simple ellipse,
 * which reads fine at the < 10 nodes a stack trace produces.
 */

export interface DotNode {
  id: string;
  lines: string[];
}

export interface DotEdge {
  a: string;
  b: string;
  label: string;
}

export interface DotGraph {
  nodes: DotNode[];
  edges: DotEdge[];
}

const EDGE_RE = /^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];\s*$/;
const NODE_RE = /^\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];\s*$/;
const LABEL_RE = /label="((?:[^"\\]|\\.)*)"/;

function unquote(raw: string): string {
  return raw.replace(/\\(.)/g, "$1");
}

function labelOf(attrs: string): string {
  const match = LABEL_RE.exec(attrs);
  return match ? match[1] : "";
}

export function parseDot(dot: string): DotGraph {
  const nodes: DotNode[] = [];
  const edges: DotEdge[] = [];
  for (const line of dot.split("\n")) {
    const edge = EDGE_RE.exec(line);
    if (edge) {
      edges.push({ a: unquote(edge[1]), b: unquote(edge[2]), label: unquote(labelOf(edge[3])) });
      continue;
    }
    const node = NODE_RE.exec(line);
    if (node && !line.includes("node [")) {
      const label = labelOf(node[2]);
      nodes.push({ id: unquote(node[1]), lines: label.split("\\n").map(unquote) });
    }
  }
  return { nodes, edges };
}

interface Point {
  x: number;
  y: number;
}

function ellipseLayout(count: number, width: number, height: number): Point[] {
  const cx = width / 2;
  const cy = height / 2;
  const rx = width / 2 - 110;
  const ry = height / 2 - 30;
  const points: Point[] = [];
  for (let i = 0; i < count; i += 1) {
    const angle = (2 * Math.PI * i) / count - Math.PI / 2;
    points.push({ x: cx + rx * Math.cos(angle), y: cy + ry * Math.sin(angle) });
  }
  return points;
}

function svgEscape(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderGraphSvg(dot: string, width = 640, height = 360): string {
  const graph = parseDot(dot);
  if (!graph.nodes.length) return "";
  const positions = new Map<string, Point>();
  ellipseLayout(graph.nodes.length, width, height).forEach((point, i) => {
    positions.set(graph.nodes[i].id, point);
  });

  const parts: string[] = [
    `<svg class="token-graph" viewBox="0 0 ${width} ${height}" ` +
      `xmlns="http://www.w3.org/2000/svg" role="img" aria-label="token graph">`,
  ];
  for (const edge of graph.edges) {
    const a = positions.get(edge.a);
    const b = positions.get(edge.b);
    if (!a || !b) continue;
    parts.push(
      `<line class="graph-edge" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"/>`,
    );
    const mx = (a.x + b.x) / 2;
    const my = (a.y + b.y) / 2;
    parts.push(
      `<text class="edge-label" x="${mx.toFixed(1)}" y="${my.toFixed(1)}">` +
        `${svgEscape(edge.label)}</text>`,
    );
  }
  for (const node of graph.nodes) {
    const p = positions.get(node.id)!;
    const label = node.lines[0] ?? node.id;
    const score = node.lines[1] ?? "";
    const boxWidth = Math.max(60, label.length * 7 + 16);
    parts.push(
      `<g class="graph-node">` +
        `<rect x="${(p.x - boxWidth / 2).toFixed(1)}" y="${(p.y - 18).toFixed(1)}" ` +
        `width="${boxWidth}" height="36" rx="8"/>` +
        `<text class="node-name" x="${p.x.toFixed(1)}" y="${(p.y - 3).toFixed(1)}">` +
        `${svgEscape(label)}</text>` +
        `<text class="node-score" x="${p.x.toFixed(1)}" y="${(p.y + 12).toFixed(1)}">` +
        `${svgEscape(score)}</text>` +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
