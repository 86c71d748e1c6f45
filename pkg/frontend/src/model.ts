/**
 * Server payload types. The UI is a thin client: every number it renders is
 * computed server-side, and entity offsets are used exactly as provided.
 */

export type TagClass = "food" | "part" | "chemical";
export type LabelChoice = "positive" | "negative" | "skip";

export interface SpanTag {
  start: number;
  end: number;
  surface: string;
  tag_class: string;
}

export interface RelationRecord {
  food: string;
  part: string | null;
  chemical: string;
  relation_text: string;
}

export interface PairRecord {
  pair_id: string;
  sentence_id: string;
  sentence_text: string;
  source_doc: string;
  relation: RelationRecord;
  spans: SpanTag[];
}

export interface BatchItem {
  pair: PairRecord;
  labels: Record<string, string>;
}

export interface Batch {
  batch_id: string;
  round_index: number;
  pair_ids: string[];
  items: BatchItem[];
}

export interface ProjectView {
  project_id: string;
  state: string;
  strategy: string;
  rounds: number;
  batch_size: number;
  completed_rounds: number;
  current_round: number;
  annotators: string[];
  current_batch?: BatchProgress;
  training: JobStatus;
}

export interface BatchProgress {
  batch_id: string;
  round_index: number;
  progress: Record<string, number>;
  batch_size: number;
  complete: boolean;
  consensus: number;
  conflicts: number;
  skips: number;
  trainable: boolean;
}

export interface JobStatus {
  status: "pending" | "running" | "done" | "failed";
  error: string | null;
}

export interface MetricSetRecord {
  precision: number;
  recall: number;
  f1: number;
  accuracy: number;
  specificity: number;
  degenerate_flags: string[];
}

export interface RoundRecord {
  round_index: number;
  sampled_ids: string[];
  cumulative_train_size: number;
  metrics: MetricSetRecord;
  positives_discovered_cumulative: number;
}

export interface MetricsPayload {
  rounds: RoundRecord[];
}

export interface DiscoveryPayload {
  curve: [number, number][];
}

export interface CurveRecord {
  thresholds: (number | null)[];
  xs: number[];
  ys: number[];
  area: number;
}

export interface CurvesPayload {
  round_index: number;
  pr: CurveRecord;
  roc: CurveRecord;
}

export interface KbTripleRecord {
  food: string;
  part: string | null;
  chemical: string;
  confidence: number;
  evidence_count: number;
  source_docs: string[];
}

export interface KbPayload {
  triples: KbTripleRecord[];
}

export interface SubmitSummary {
  accepted: number;
  rejected: { pair_id: string; reason: string }[];
  progress: Record<string, number>;
  batch_size: number;
  complete: boolean;
  consensus: number;
  conflicts: number;
  skips: number;
  trainable: boolean;
}

export interface RoundStatus {
  round_index: number;
  trained: boolean;
  job: JobStatus;
  record?: RoundRecord;
}
