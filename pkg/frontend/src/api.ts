/** Typed client for the workbench HTTP API. */

import type {
  Batch,
  CurvesPayload,
  DiscoveryPayload,
  JobStatus,
  KbPayload,
  MetricsPayload,
  ProjectView,
  RoundStatus,
  SubmitSummary,
} from "./model.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON error bodies fall through with an empty detail
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  project(projectId: string): Promise<ProjectView> {
    return this.request(`/projects/${projectId}`);
  }

  createProject(body: object): Promise<ProjectView> {
    return this.request("/projects", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  batch(projectId: string, roundIndex: number): Promise<Batch> {
    return this.request(`/projects/${projectId}/rounds/${roundIndex}/batch`);
  }

  submitLabels(
    projectId: string,
    batchId: string,
    annotatorId: string,
    token: string,
    labels: Record<string, string>,
  ): Promise<SubmitSummary> {
    return this.request(`/projects/${projectId}/batches/${batchId}/labels`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Annotator-Token": token,
      },
      body: JSON.stringify({ annotator_id: annotatorId, labels }),
    });
  }

  advanceRound(projectId: string, roundIndex: number): Promise<JobStatus> {
    return this.request(`/projects/${projectId}/rounds/${roundIndex}/advance`, {
      method: "POST",
    });
  }

  roundStatus(projectId: string, roundIndex: number): Promise<RoundStatus> {
    return this.request(`/projects/${projectId}/rounds/${roundIndex}`);
  }

  metrics(projectId: string): Promise<MetricsPayload> {
    return this.request(`/projects/${projectId}/metrics`);
  }

  discovery(projectId: string): Promise<DiscoveryPayload> {
    return this.request(`/projects/${projectId}/discovery`);
  }

  curves(projectId: string): Promise<CurvesPayload> {
    return this.request(`/projects/${projectId}/curves`);
  }

  kb(projectId: string): Promise<KbPayload> {
    return this.request(`/projects/${projectId}/kb`);
  }

  /** Poll until the round's training job finishes (or fails). */
  async waitForRound(
    projectId: string,
    roundIndex: number,
    intervalMs = 150,
    timeoutMs = 120_000,
  ): Promise<RoundStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.roundStatus(projectId, roundIndex);
      if (status.trained) return status;
      if (status.job.status === "failed") {
        throw new ApiError(500, status.job.error ?? "training failed");
      }
      if (Date.now() > deadline) {
        throw new ApiError(408, `round ${roundIndex} training timed out`);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
