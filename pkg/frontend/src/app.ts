/**
 * Workbench page: annotator panel plus monitoring dashboard.
 *
 * One annotator session per page. Labeling is optimistic with a submission
 * queue flushed on an interval; batch/round state is polled (no server
 * push). All numbers shown come from the server.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  curveSeries,
  discoverySeries,
  kbRows,
  metricSeries,
  progressText,
} from "./dashboard.js";
import { segmentSentence } from "./highlight.js";
import { keyToLabel } from "./keyboard.js";
import type { Batch, LabelChoice, ProjectView } from "./model.js";
import { LabelQueue } from "./queue.js";
import { el, lineChart } from "./render.js";

const DEFAULT_POLL_MS = 2000;
const FLUSH_MS = 700;

interface Session {
  api: ApiClient;
  projectId: string;
  annotatorId: string;
  token: string;
}

function readConfig(): { baseUrl: string; pollMs: number } {
  const read = (name: string) =>
    document.querySelector(`meta[name="${name}"]`)?.getAttribute("content") || "";
  return {
    baseUrl: read("foodkb-base-url") || window.location.origin,
    pollMs: Number(read("foodkb-poll-ms")) || DEFAULT_POLL_MS,
  };
}

class WorkbenchApp {
  private session: Session | null = null;
  private queue: LabelQueue | null = null;
  private batch: Batch | null = null;
  private view: ProjectView | null = null;
  private root: HTMLElement;
  private notice: HTMLElement;

  constructor(private baseUrl: string, pollMs = DEFAULT_POLL_MS) {
    this.root = document.getElementById("app") ?? document.body;
    this.notice = el("div", { class: "notice", role: "status" });
    this.renderLogin();
    window.setInterval(() => void this.poll(), pollMs);
    window.setInterval(() => void this.queue?.flush(), FLUSH_MS);
    document.addEventListener("keydown", (event) => this.onKey(event));
  }

  private showNotice(message: string): void {
    this.notice.textContent = message;
  }

  // -- login ---------------------------------------------------------------

  private renderLogin(): void {
    const project = el("input", { id: "project", placeholder: "project id" });
    const annotator = el("input", { id: "annotator", placeholder: "annotator id" });
    const token = el("input", { id: "token", placeholder: "token", type: "password" });
    const button = el("button", {}, ["open project"]);
    button.addEventListener("click", () => {
      void this.start(project.value, annotator.value, token.value);
    });
    this.root.replaceChildren(
      el("h1", {}, ["food knowledge-base workbench"]),
      el("div", { class: "login" }, [project, annotator, token, button]),
      this.notice,
    );
  }

  private async start(projectId: string, annotatorId: string, token: string) {
    const api = new ApiClient(this.baseUrl);
    try {
      this.view = await api.project(projectId);
    } catch (error) {
      this.showNotice(error instanceof Error ? error.message : String(error));
      return;
    }
    this.session = { api, projectId, annotatorId, token };
    await this.poll();
  }

  // -- polling ---------------------------------------------------------------

  private async poll(): Promise<void> {
    if (!this.session) return;
    const { api, projectId } = this.session;
    try {
      this.view = await api.project(projectId);
      if (this.view.state !== "complete") {
        const round = this.view.current_round;
        const batch = await api.batch(projectId, round);
        if (!this.batch || this.batch.batch_id !== batch.batch_id) {
          this.batch = batch;
          this.makeQueue(batch);
        } else {
          this.batch = batch;
        }
      }
      this.render();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.render(); // model pending or round closed; header shows status
        return;
      }
      this.showNotice(error instanceof Error ? error.message : String(error));
    }
  }

  private makeQueue(batch: Batch): void {
    const { api, projectId, annotatorId, token } = this.session!;
    this.queue = new LabelQueue(
      (labels) =>
        api.submitLabels(projectId, batch.batch_id, annotatorId, token, labels),
      {
        onNotice: (message) => this.showNotice(message),
        onItemState: () => this.renderItems(),
        onSummary: () => this.renderHeader(),
      },
    );
  }

  // -- keyboard --------------------------------------------------------------

  private focusedPair: string | null = null;

  private onKey(event: KeyboardEvent): void {
    const choice = keyToLabel(event.key);
    if (!choice || !this.focusedPair || !this.queue) return;
    this.queue.label(this.focusedPair, choice);
  }

  // -- rendering ---------------------------------------------------------------

  private header = el("div", { class: "header" });
  private itemsBox = el("div", { class: "items" });
  private dashboard = el("div", { class: "dashboard" });

  private render(): void {
    this.root.replaceChildren(
      el("h1", {}, [`project ${this.session?.projectId ?? ""}`]),
      this.notice,
      this.header,
      this.itemsBox,
      this.dashboard,
    );
    this.renderHeader();
    this.renderItems();
    void this.renderDashboard();
  }

  private renderHeader(): void {
    if (!this.view) return;
    const v = this.view;
    const parts: (Node | string)[] = [
      el("span", {}, [`state: ${v.state}`]),
      el("span", {}, [`round ${v.current_round}/${v.rounds}`]),
      el("span", {}, [`strategy: ${v.strategy}`]),
    ];
    if (v.current_batch) {
      parts.push(
        el("span", {}, [
          progressText(v.current_batch.progress, v.current_batch.batch_size),
        ]),
        el("span", {}, [
          `consensus ${v.current_batch.consensus}, conflicts ${v.current_batch.conflicts}, skips ${v.current_batch.skips}`,
        ]),
      );
      if (v.current_batch.trainable && v.training.status !== "running") {
        const advance = el("button", {}, ["advance round"]);
        advance.addEventListener("click", () => void this.advance());
        parts.push(advance);
      }
    }
    if (v.training.status === "running") {
      parts.push(el("span", { class: "spinner" }, ["training…"]));
    }
    if (this.queue && this.queue.failureCount() > 0) {
      parts.push(el("span", { class: "badge-warn" }, ["offline: labels queued"]));
    }
    this.header.replaceChildren(...parts);
  }

  private async advance(): Promise<void> {
    if (!this.session || !this.view) return;
    try {
      await this.session.api.advanceRound(
        this.session.projectId,
        this.view.current_round,
      );
      this.showNotice("training started");
    } catch (error) {
      this.showNotice(error instanceof Error ? error.message : String(error));
    }
  }

  private renderItems(): void {
    if (!this.batch || !this.queue) {
      this.itemsBox.replaceChildren();
      return;
    }
    const rows = this.batch.items.map((item) => {
      const pair = item.pair;
      const sentence = el("span", { class: "sentence" });
      for (const segment of segmentSentence(pair.sentence_text, pair.spans)) {
        sentence.append(
          segment.tagClass
            ? el("mark", { class: `tag-${segment.tagClass}` }, [segment.text])
            : segment.text,
        );
      }
      const state = this.queue!.stateOf(pair.pair_id);
      const chosen = this.queue!.labelOf(pair.pair_id);
      const buttons = (["positive", "negative", "skip"] as LabelChoice[]).map(
        (choice, index) => {
          const button = el(
            "button",
            {
              class: chosen === choice ? "chosen" : "",
              "aria-keyshortcuts": String(index + 1),
            },
            [`${index + 1} ${choice}`],
          );
          button.addEventListener("click", () =>
            this.queue!.label(pair.pair_id, choice),
          );
          return button;
        },
      );
      const row = el("div", { class: `item state-${state}`, tabindex: "0" }, [
        sentence,
        el("div", { class: "relation" }, [pair.relation.relation_text]),
        el("div", { class: "controls" }, buttons),
        el("span", { class: "state" }, [state]),
      ]);
      row.addEventListener("focusin", () => {
        this.focusedPair = pair.pair_id;
      });
      return row;
    });
    this.itemsBox.replaceChildren(...rows);
  }

  private async renderDashboard(): Promise<void> {
    if (!this.session) return;
    const { api, projectId } = this.session;
    const blocks: Node[] = [el("h2", {}, ["dashboard"])];
    try {
      const metrics = await api.metrics(projectId);
      if (metrics.rounds.length > 0) {
        blocks.push(
          el("h3", {}, ["test metrics per round"]),
          lineChart(metricSeries(metrics), 420, 180, 1),
        );
        const discovery = await api.discovery(projectId);
        blocks.push(
          el("h3", {}, ["discovery curve"]),
          lineChart([discoverySeries(discovery)]),
        );
        try {
          const curves = await api.curves(projectId);
          blocks.push(
            el("h3", {}, [
              `round ${curves.round_index} curves (AUCPR ${curves.pr.area.toFixed(3)}, AUROC ${curves.roc.area.toFixed(3)})`,
            ]),
            lineChart(
              [curveSeries("PR", curves.pr), curveSeries("ROC", curves.roc)],
              420,
              180,
              1,
            ),
          );
        } catch {
          // curves absent until a round trains with a two-class test set
        }
        const kb = await api.kb(projectId);
        if (kb.triples.length > 0) {
          const table = el("table", { class: "kb" }, [
            el("tr", {}, [
              el("th", {}, ["relation"]),
              el("th", {}, ["confidence"]),
              el("th", {}, ["evidence"]),
              el("th", {}, ["sources"]),
            ]),
            ...kbRows(kb).map((row) =>
              el("tr", {}, [
                el("td", {}, [row.relation]),
                el("td", {}, [row.confidence]),
                el("td", {}, [String(row.evidence)]),
                el("td", {}, [row.sources]),
              ]),
            ),
          ]);
          blocks.push(el("h3", {}, ["knowledge base"]), table);
        }
      } else {
        blocks.push(el("p", {}, ["no trained rounds yet"]));
      }
    } catch {
      blocks.push(el("p", {}, ["dashboard unavailable"]));
    }
    this.dashboard.replaceChildren(...blocks);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const config = readConfig();
  new WorkbenchApp(config.baseUrl, config.pollMs);
}
