import type { GraphDoc, GraphNode } from "./types";

const WIDTH = 520;
const HEIGHT = 360;
const MIN_RADIUS = 6;
const MAX_RADIUS = 26;

/** Radius proportional to rank, normalized against the largest rank shown. */
export function nodeRadius(node: GraphNode, maxRank: number): number {
  if (maxRank <= 0) return MIN_RADIUS;
  return MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * (node.rank / maxRank);
}

/** Deterministic circular layout; positions depend only on node order. */
function layout(doc: GraphDoc): Map<string, { x: number; y: number }> {
  const positions = new Map<string, { x: number; y: number }>();
  const n = doc.nodes.length;
  const cx = WIDTH / 2;
  const cy = HEIGHT / 2;
  const radius = Math.min(cx, cy) - MAX_RADIUS - 4;
  doc.nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    positions.set(node.id, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  return positions;
}

/** Render the entity graph as an SVG node-link view into `container`. */
export function renderGraph(container: HTMLElement, doc: GraphDoc): void {
  container.innerHTML = "";
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.classList.add("entity-graph");
  const positions = layout(doc);
  const maxRank = Math.max(0, ...doc.nodes.map((n) => n.rank));
  const maxWeight = Math.max(1e-12, ...doc.edges.map((e) => e.weight));

  for (const edge of doc.edges) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) continue;
    const line = document.createElementNS("http://www.w3.org/2000/svg", "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("stroke-width", String(0.5 + 2.5 * (edge.weight / maxWeight)));
    line.classList.add("graph-edge");
    svg.appendChild(line);
  }

  for (const node of doc.nodes) {
    const pos = positions.get(node.id)!;
    const group = document.createElementNS("http://www.w3.org/2000/svg", "g");
    group.classList.add("graph-node", `tier-${node.tier}`);
    group.dataset.nodeId = node.id;

    const circle = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", String(pos.x));
    circle.setAttribute("cy", String(pos.y));
    circle.setAttribute("r", String(nodeRadius(node, maxRank)));
    // hover reveals id and rank
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `${node.id} (rank ${node.rank.toFixed(4)})`;
    circle.appendChild(title);
    group.appendChild(circle);

    const label = document.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", String(pos.x));
    label.setAttribute("y", String(pos.y - nodeRadius(node, maxRank) - 3));
    label.setAttribute("text-anchor", "middle");
    label.textContent = shortLabel(node.id);
    group.appendChild(label);

    svg.appendChild(group);
  }
  container.appendChild(svg);
}

function shortLabel(entityId: string): string {
  const tail = entityId.split(/[/:]/).pop() ?? entityId;
  return tail.replace(/_/g, " ");
}
