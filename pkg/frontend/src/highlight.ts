/**
 * Sentence segmentation from server-provided entity offsets.
 *
 * The server's offsets are authoritative: the client slices the sentence at
 * exactly those positions and never re-tokenizes. Overlapping spans (rare,
 * e.g. a part name inside a species name) resolve first-span-wins so output
 * segments are disjoint and cover the sentence exactly.
 */

import type { SpanTag } from "./model.js";

export interface Segment {
  text: string;
  tagClass: string | null;
}

export function segmentSentence(text: string, spans: SpanTag[]): Segment[] {
  const usable = [...spans]
    .filter((s) => s.start >= 0 && s.end <= text.length && s.start < s.end)
    .sort((a, b) => a.start - b.start || b.end - a.end);

  const segments: Segment[] = [];
  let cursor = 0;
  for (const span of usable) {
    if (span.start < cursor) continue; // overlap: first span wins
    if (span.start > cursor) {
      segments.push({ text: text.slice(cursor, span.start), tagClass: null });
    }
    segments.push({
      text: text.slice(span.start, span.end),
      tagClass: span.tag_class,
    });
    cursor = span.end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), tagClass: null });
  }
  return segments;
}

/** Reassembling the segments must reproduce the sentence byte-for-byte. */
export function segmentsCoverText(text: string, segments: Segment[]): boolean {
  return segments.map((s) => s.text).join("") === text;
}
