/** Application wiring: chat panel, subgraph inspector, prompt inspector.
 *
 * The UI is a thin shell over the /v1 endpoints: answers, subgraphs,
 * prompts, and timings are rendered exactly as the service returned them.
 */

import { ApiClient, ApiError, NetworkError, QueryRequest } from "./api.js";
import { GraphView } from "./graphview.js";
import { CurrentNodeSelection } from "./state.js";
import type { QueryResponse } from "./types.js";

/** Minimal CSV field pair parser for `id,name` rows (names may be quoted). */
export function parseNodeNames(subgraphText: string): Map<number, string> {
  const names = new Map<number, string>();
  const lines = subgraphText.split("\n");
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line === "") break; // edge section follows
    const comma = line.indexOf(",");
    if (comma < 0) continue;
    const id = Number(line.slice(0, comma));
    let name = line.slice(comma + 1);
    if (name.startsWith('"') && name.endsWith('"')) {
      name = name.slice(1, -1).replace(/""/g, '"');
    }
    if (Number.isFinite(id)) names.set(id, name);
  }
  return names;
}

function fmtMs(seconds: number | undefined): string {
  return seconds === undefined ? "-" : `${(seconds * 1000).toFixed(1)} ms`;
}

export class App {
  readonly api: ApiClient;
  readonly selection = new CurrentNodeSelection();
  pending: Promise<void> | null = null;

  private view: GraphView;
  private lastRequest: QueryRequest | null = null;
  private graphId: string | null = null;

  constructor(
    private readonly doc: Document,
    baseUrl = "",
  ) {
    this.api = new ApiClient(baseUrl);
    const svg = this.el<SVGSVGElement>("#subgraph-view");
    this.view = new GraphView(svg, {
      onNodeClick: (id) => {
        this.selection.toggle(id);
      },
    });
    this.selection.onChange((id) => {
      this.view.setSelected(id);
      this.el("#selection-status").textContent =
        id === null
          ? "current state: (home, default)"
          : `current state: node ${id}`;
    });

    this.el<HTMLFormElement>("#ask-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.pending = this.submit();
    });
    this.el("#clear-selection").addEventListener("click", () => this.selection.clear());
    this.el("#copy-prompt").addEventListener("click", () => void this.copyPrompt());
    this.el("#refresh-graphs").addEventListener("click", () => {
      this.pending = this.refreshGraphs();
    });
  }

  el<T extends Element = HTMLElement>(selector: string): T {
    const found = this.doc.querySelector(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found as T;
  }

  async init(): Promise<void> {
    await this.refreshGraphs();
  }

  async refreshGraphs(): Promise<void> {
    try {
      const { graphs } = await this.api.listGraphs();
      const select = this.el<HTMLSelectElement>("#graph-select");
      const previous = this.graphId;
      select.innerHTML = "";
      for (const id of graphs) {
        const option = this.doc.createElement("option");
        option.value = id;
        option.textContent = id;
        select.appendChild(option);
      }
      if (graphs.length > 0) {
        this.graphId = previous && graphs.includes(previous) ? previous : graphs[0];
        select.value = this.graphId;
      }
      select.addEventListener("change", () => {
        this.graphId = select.value;
        this.selection.clear();
      });
      this.clearError();
    } catch (err) {
      this.showError(err, "loading graph list");
    }
  }

  async submit(): Promise<void> {
    const input = this.el<HTMLInputElement>("#question-input");
    const question = input.value.trim();
    if (!question) {
      this.showValidation("type a question first");
      return;
    }
    if (!this.graphId) {
      this.showValidation("no graph selected; upload one or refresh the list");
      return;
    }
    const compare = this.el<HTMLInputElement>("#compare-toggle").checked;
    const request: QueryRequest = { graph_id: this.graphId, question };
    const current = this.selection.requestValue();
    if (current !== undefined) request.current_node = current;
    this.lastRequest = request;

    this.clearError();
    this.setBusy(true);
    try {
      const grounded = await this.api.query(request);
      let bare: QueryResponse | null = null;
      if (compare) {
        bare = await this.api.query({ ...request, bare: true });
      }
      this.renderTurn(question, grounded, bare);
    } catch (err) {
      this.showError(err, "query");
    } finally {
      this.setBusy(false);
    }
  }

  /** Re-issue the last request after a transport failure; input is intact. */
  async retry(): Promise<void> {
    if (this.lastRequest) {
      this.pending = this.submit();
      await this.pending;
    }
  }

  private renderTurn(question: string, grounded: QueryResponse, bare: QueryResponse | null): void {
    const log = this.el("#chat-log");
    const turn = this.doc.createElement("div");
    turn.className = "turn";

    const q = this.doc.createElement("div");
    q.className = "question";
    q.textContent = question;
    turn.appendChild(q);

    const answers = this.doc.createElement("div");
    answers.className = bare ? "answers compare" : "answers";
    answers.appendChild(this.answerCard("grounded", grounded));
    if (bare) answers.appendChild(this.answerCard("bare LLM", bare));
    turn.appendChild(answers);
    log.appendChild(turn);

    if (grounded.subgraph) {
      this.view = new GraphView(this.el<SVGSVGElement>("#subgraph-view"), {
        nodeNames: parseNodeNames(grounded.subgraph_text),
        onNodeClick: (id) => this.selection.toggle(id),
      });
      this.view.render(grounded.subgraph);
      this.view.setSelected(this.selection.get());
      this.el("#subgraph-summary").textContent =
        `${grounded.subgraph.nodes.length} nodes / ${grounded.subgraph.edges.length} edges, ` +
        `objective ${grounded.subgraph.objective.toFixed(2)}`;
    }

    this.el("#prompt-text").textContent = grounded.prompt;
  }

  private answerCard(label: string, resp: QueryResponse): HTMLElement {
    const card = this.doc.createElement("div");
    card.className = "answer-card";
    const head = this.doc.createElement("div");
    head.className = "answer-head";
    const t = resp.timings;
    head.textContent =
      `${label} · total ${fmtMs(t.total)} (retrieve ${fmtMs(t.retrieve)}, ` +
      `pcst ${fmtMs(t.pcst)}, llm ${fmtMs(t.llm)})`;
    const body = this.doc.createElement("pre");
    body.className = "answer-body";
    body.textContent = resp.answer;
    card.appendChild(head);
    card.appendChild(body);
    return card;
  }

  private async copyPrompt(): Promise<void> {
    const text = this.el("#prompt-text").textContent ?? "";
    const clipboard = (this.doc.defaultView?.navigator as Navigator | undefined)?.clipboard;
    if (clipboard) {
      await clipboard.writeText(text);
      this.el("#copy-prompt").textContent = "copied";
    }
  }

  private showValidation(message: string): void {
    const bar = this.el("#error-bar");
    bar.className = "error-bar validation";
    bar.textContent = message;
  }

  private showError(err: unknown, where: string): void {
    const bar = this.el("#error-bar");
    bar.innerHTML = "";
    bar.className = "error-bar error";
    const text = this.doc.createElement("span");
    if (err instanceof ApiError) {
      text.textContent = `${err.body.class} (${where}): ${err.body.detail}`;
      if (err.body.class === "unknown-graph") {
        text.textContent += " — pick a graph from the list above";
      }
      bar.appendChild(text);
    } else if (err instanceof NetworkError) {
      text.textContent = `service unreachable (${where})`;
      bar.appendChild(text);
      const retry = this.doc.createElement("button");
      retry.id = "retry-button";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.retry());
      bar.appendChild(retry);
    } else {
      text.textContent = `unexpected failure (${where}): ${String(err)}`;
      bar.appendChild(text);
    }
  }

  private clearError(): void {
    const bar = this.el("#error-bar");
    bar.className = "error-bar";
    bar.textContent = "";
  }

  private setBusy(busy: boolean): void {
    this.el<HTMLButtonElement>("#ask-button").disabled = busy;
  }
}

export function start(doc: Document, baseUrl = ""): App {
  const app = new App(doc, baseUrl);
  app.pending = app.init();
  return app;
}
