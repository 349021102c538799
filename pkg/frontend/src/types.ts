/** Wire types for the /v1 endpoints. Everything the UI shows comes verbatim
 * from these payloads; the client never recomputes pipeline artifacts. */

export interface GraphStats {
  node_count: number;
  edge_count: number;
  reachable_fraction: number;
  max_out_degree: number;
}

export interface SubgraphEdge {
  src: number;
  tgt: number;
  action: string;
  kind: string;
}

export interface SubgraphPayload {
  nodes: number[];
  edges: SubgraphEdge[];
  objective: number;
  connected: boolean;
}

export interface Timings {
  embed_query?: number;
  retrieve?: number;
  pcst?: number;
  llm?: number;
  total?: number;
  [stage: string]: number | undefined;
}

export interface QueryResponse {
  answer: string;
  subgraph: SubgraphPayload | null;
  subgraph_text: string;
  prompt: string;
  token_estimate: number;
  timings: Timings;
}

export interface RetrieveResponse {
  top_nodes: [number, number][];
  top_edges: [number, number][];
  pinned_node: number | null;
  subgraph: SubgraphPayload;
  subgraph_text: string;
  timings: Timings;
}

export interface QueryLogRecord {
  timestamp: number;
  graph_id: string;
  question: string;
  current_node: number | null;
  pinned_node?: number;
  outcome: string;
}

export interface ErrorBody {
  class: string;
  stage: string;
  detail: string;
}
