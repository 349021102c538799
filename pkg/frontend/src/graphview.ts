/** SVG node-link view of the last retrieved subgraph. Clicking a node
 * selects it as the current state for the next question. */

import { forceLayout } from "./layout.js";
import type { SubgraphPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GraphViewOptions {
  width?: number;
  height?: number;
  seed?: number;
  nodeNames?: Map<number, string>;
  onNodeClick?: (id: number) => void;
}

export class GraphView {
  private readonly width: number;
  private readonly height: number;
  private readonly seed: number;
  private subgraph: SubgraphPayload | null = null;
  private selected: number | null = null;

  constructor(
    private readonly svg: SVGSVGElement,
    private readonly options: GraphViewOptions = {},
  ) {
    this.width = options.width ?? 520;
    this.height = options.height ?? 380;
    this.seed = options.seed ?? 42;
    svg.setAttribute("viewBox", `0 0 ${this.width} ${this.height}`);
  }

  render(subgraph: SubgraphPayload): void {
    this.subgraph = subgraph;
    this.draw();
  }

  setSelected(id: number | null): void {
    this.selected = id;
    if (this.subgraph) this.draw();
  }

  nodeCount(): number {
    return this.svg.querySelectorAll("circle").length;
  }

  private draw(): void {
    const sg = this.subgraph;
    if (!sg) return;
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);

    const positions = forceLayout(sg, this.width, this.height, this.seed);
    const pos = new Map(positions.map((p) => [p.id, p]));

    for (const e of sg.edges) {
      const a = pos.get(e.src);
      const b = pos.get(e.tgt);
      if (!a || !b) continue;
      if (e.src === e.tgt) {
        const loop = document.createElementNS(SVG_NS, "circle");
        loop.setAttribute("cx", String(a.x + 10));
        loop.setAttribute("cy", String(a.y - 10));
        loop.setAttribute("r", "8");
        loop.setAttribute("class", "edge self-loop");
        loop.setAttribute("fill", "none");
        this.svg.appendChild(loop);
        continue;
      }
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("class", `edge kind-${e.kind}`);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${e.src} → ${e.tgt}: ${e.action} (${e.kind})`;
      line.appendChild(title);
      this.svg.appendChild(line);
    }

    for (const id of sg.nodes) {
      const p = pos.get(id);
      if (!p) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "node-group");

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(p.x));
      circle.setAttribute("cy", String(p.y));
      circle.setAttribute("r", id === this.selected ? "11" : "8");
      circle.setAttribute("class", id === this.selected ? "node selected" : "node");
      circle.setAttribute("data-node-id", String(id));
      circle.addEventListener("click", () => this.options.onNodeClick?.(id));
      const title = document.createElementNS(SVG_NS, "title");
      const name = this.options.nodeNames?.get(id);
      title.textContent = name ? `${id}: ${name}` : String(id);
      circle.appendChild(title);
      group.appendChild(circle);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(p.x + 12));
      label.setAttribute("y", String(p.y + 4));
      label.setAttribute("class", "node-label");
      label.textContent = name ?? String(id);
      group.appendChild(label);

      this.svg.appendChild(group);
    }
  }
}
