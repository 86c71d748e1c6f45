/**
 * Dashboard view-models: reshape server payloads for rendering.
 *
 * No metric math happens here; values pass through exactly as computed by
 * the server.
 */

import type {
  CurveRecord,
  DiscoveryPayload,
  KbPayload,
  MetricsPayload,
} from "./model.js";

export const METRIC_NAMES = [
  "precision",
  "recall",
  "f1",
  "accuracy",
  "specificity",
] as const;

export type MetricName = (typeof METRIC_NAMES)[number];

export interface Series {
  name: string;
  points: [number, number][];
}

export function metricSeries(payload: MetricsPayload): Series[] {
  return METRIC_NAMES.map((name) => ({
    name,
    points: payload.rounds.map((round) => [
      round.round_index,
      round.metrics[name],
    ]),
  }));
}

export function discoverySeries(payload: DiscoveryPayload): Series {
  return { name: "positives discovered", points: payload.curve };
}

export function curveSeries(name: string, curve: CurveRecord): Series {
  return {
    name,
    points: curve.xs.map((x, i) => [x, curve.ys[i] ?? 0]),
  };
}

export interface KbRow {
  relation: string;
  confidence: string;
  evidence: number;
  sources: string;
}

export function kbRows(payload: KbPayload): KbRow[] {
  return payload.triples.map((t) => ({
    relation: t.part
      ? `${t.food} ${t.part} contains ${t.chemical}`
      : `${t.food} contains ${t.chemical}`,
    confidence: t.confidence.toFixed(6),
    evidence: t.evidence_count,
    sources: t.source_docs.join("; "),
  }));
}

export interface ProgressSummary {
  labeled: Record<string, string>;
  consensus: number;
  conflicts: number;
  skips: number;
  trainable: boolean;
}

export function progressText(
  progress: Record<string, number>,
  batchSize: number,
): string {
  return Object.entries(progress)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([annotator, done]) => `${annotator}: ${done}/${batchSize}`)
    .join("  ");
}
