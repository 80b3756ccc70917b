// Wire formats of the glcvis HTTP JSON service. The UI treats these as
// opaque analytics: it renders what the service returns and computes
// nothing itself.

export interface AttributeSummary {
  name: string;
  min: number;
  max: number;
}

export interface DatasetSummary {
  attributes: AttributeSummary[];
  n_rows: number;
  classes: string[];
  class_counts: Record<string, number>;
  dropped_rows: number;
  labels: string[];
}

export interface SessionCreated {
  id: string;
  dataset_version: number;
  summary: DatasetSummary;
}

export interface DatasetResponse {
  dataset_version: number;
  summary: DatasetSummary;
  normalized_rows: number[][];
}

export interface GraphJson {
  system: string;
  nodes: [number, number][];
  plane_index: number[];
  original_dim: number;
  pairing?: [number, number][];
  offsets?: number[][] | number[];
  angles?: number[];
}

export interface EncodeResponse {
  system: string;
  graphs: GraphJson[];
  labels: string[];
  dataset_version: number;
}

export type Membership = "inside" | "outside";

export interface RectClauseJson {
  plane: number;
  rect: [number, number, number, number]; // x_lo, x_hi, y_lo, y_hi
  membership: Membership;
}

export interface RectRuleJson {
  clauses: RectClauseJson[];
  then_class: string;
  else_class: string;
}

export interface RuleEvalResponse {
  report: {
    accuracy: number;
    correct: number;
    total: number;
    confusion: { true: string; predicted: string; count: number }[];
    covered_ids: number[];
  };
  accuracy: number;
  text: string;
  dataset_version: number;
}

export interface ModelJson {
  coefficients: number[];
  threshold: number;
  positive_class: string;
  negative_class: string;
  attribute_names?: string[];
}

export interface TrainResponse {
  name: string;
  model: ModelJson;
  accuracy: number;
  angles: number[];
  dataset_version: number;
}

export interface AnglesResponse {
  projections: number[];
  threshold: number;
  accuracy: number;
  model: ModelJson;
  dataset_version: number;
}

export interface FspResponse {
  pairing: [number, number][];
  rule: RectRuleJson;
  report: RuleEvalResponse["report"];
  accuracy: number;
  text: string;
  dataset_version: number;
}

export interface ExplainDiff {
  query: number[];
  true_class: string;
  predicted_class: string;
  neighbor_rows: number[];
  neighbors: number[][];
  deltas: number[][];
  changed: boolean[][];
  distances: number[];
}

export interface ExplainResponse {
  diff: ExplainDiff;
  dataset_version: number;
}

export interface JlEstimateResponse {
  m: number;
  epsilon: number;
  k_min: number;
}

export type ViewName = "pairing" | "spc-rules" | "glcl" | "explain" | "jl";

export type Pairing = [number, number][];
