/**
 * Optimistic label queue.
 *
 * Labeling an item updates the UI immediately and enqueues the submission;
 * flushes batch all pending labels into one request. Network failures keep
 * the labels queued (retried on later flushes, warning badge shown); server
 * rejections revert the optimistic state for exactly the rejected items and
 * surface a notice.
 */

import { ApiError } from "./api.js";
import type { LabelChoice, SubmitSummary } from "./model.js";

export type ItemState = "unlabeled" | "pending" | "synced" | "rejected";

export interface QueueCallbacks {
  onItemState?(pairId: string, state: ItemState, label: LabelChoice | null): void;
  onNotice?(message: string): void;
  onSummary?(summary: SubmitSummary): void;
}

export type SubmitFn = (labels: Record<string, string>) => Promise<SubmitSummary>;

export class LabelQueue {
  private chosen = new Map<string, LabelChoice>();
  private pending = new Map<string, LabelChoice>();
  private synced = new Map<string, LabelChoice>();
  private flushing = false;
  private failures = 0;

  constructor(
    private submit: SubmitFn,
    private callbacks: QueueCallbacks = {},
  ) {}

  label(pairId: string, choice: LabelChoice): void {
    this.chosen.set(pairId, choice);
    this.pending.set(pairId, choice);
    this.callbacks.onItemState?.(pairId, "pending", choice);
  }

  labelOf(pairId: string): LabelChoice | null {
    return this.chosen.get(pairId) ?? null;
  }

  stateOf(pairId: string): ItemState {
    if (this.pending.has(pairId)) return "pending";
    if (this.synced.has(pairId)) return "synced";
    return "unlabeled";
  }

  pendingCount(): number {
    return this.pending.size;
  }

  syncedCount(): number {
    return this.synced.size;
  }

  /** Consecutive failed flushes; nonzero drives the offline warning badge. */
  failureCount(): number {
    return this.failures;
  }

  async flush(): Promise<SubmitSummary | null> {
    if (this.flushing || this.pending.size === 0) return null;
    this.flushing = true;
    const batch = new Map(this.pending);
    try {
      const summary = await this.submit(Object.fromEntries(batch));
      this.failures = 0;
      const rejected = new Set(summary.rejected.map((r) => r.pair_id));
      for (const [pairId, choice] of batch) {
        if (this.pending.get(pairId) !== choice) continue; // relabeled meanwhile
        this.pending.delete(pairId);
        if (rejected.has(pairId)) {
          this.chosen.delete(pairId);
          this.callbacks.onItemState?.(pairId, "rejected", null);
        } else {
          this.synced.set(pairId, choice);
          this.callbacks.onItemState?.(pairId, "synced", choice);
        }
      }
      if (summary.rejected.length > 0) {
        const reasons = summary.rejected
          .map((r) => `${r.pair_id.slice(0, 8)}: ${r.reason}`)
          .join("; ");
        this.callbacks.onNotice?.(`rejected ${summary.rejected.length} label(s): ${reasons}`);
      }
      this.callbacks.onSummary?.(summary);
      return summary;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // round closed: these labels can never land; revert them all
        for (const [pairId] of batch) {
          this.pending.delete(pairId);
          this.chosen.delete(pairId);
          this.callbacks.onItemState?.(pairId, "rejected", null);
        }
        this.callbacks.onNotice?.(`round closed: ${error.detail}`);
        return null;
      }
      // transport trouble: keep everything queued for the next flush
      this.failures += 1;
      this.callbacks.onNotice?.(
        `submission failed (attempt ${this.failures}); labels queued for retry`,
      );
      return null;
    } finally {
      this.flushing = false;
    }
  }
}
