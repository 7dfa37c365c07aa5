export interface GraphNode {
  id: string;
  rank: number;
  tier: "top" | "bottom";
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphDoc {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface EntityHighlight {
  surface: string;
  entity_id: string;
  confidence: number;
  start: number;
  end: number;
  kind: string;
}

export interface PassageView {
  id: string;
  text: string;
  score: number;
  entities: EntityHighlight[];
}

export interface TurnResponse {
  turn: number;
  prompt: string;
  rewritten_query: string;
  ranked: string[];
  passages: PassageView[];
  selected: string[];
  graph: GraphDoc;
  answer: string;
  answer_words: number;
  timings: Record<string, number>;
}

export interface TranscriptTurn {
  turn: number;
  query: string;
  prompt: string;
  rewritten_query: string;
  ranked: string[];
  selected: string[];
  answer: string;
}

export interface Transcript {
  session_id: string;
  created_at: number;
  turns: TranscriptTurn[];
}

export interface RescoreResponse {
  turn: number;
  method: string;
  gamma: number;
  selected: string[];
  graph: GraphDoc;
  answer: string;
  answer_words: number;
}

export type ScoringMethod = "O" | "ER" | "EG";

export interface ControlValues {
  gamma: number;
  method: ScoringMethod;
  min_length: number;
  include_query: boolean;
}
