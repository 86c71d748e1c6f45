import { describe, expect, it } from "vitest";

import {
  curveSeries,
  discoverySeries,
  kbRows,
  metricSeries,
  progressText,
} from "../src/dashboard.js";
import { keyToLabel } from "../src/keyboard.js";
import type { MetricsPayload } from "../src/model.js";

const METRICS: MetricsPayload = {
  rounds: [
    {
      round_index: 1,
      sampled_ids: ["a"],
      cumulative_train_size: 10,
      metrics: {
        precision: 0.5,
        recall: 0.25,
        f1: 0.333,
        accuracy: 0.6,
        specificity: 0.75,
        degenerate_flags: [],
      },
      positives_discovered_cumulative: 4,
    },
    {
      round_index: 2,
      sampled_ids: ["b"],
      cumulative_train_size: 20,
      metrics: {
        precision: 0.9,
        recall: 0.8,
        f1: 0.847,
        accuracy: 0.85,
        specificity: 0.88,
        degenerate_flags: [],
      },
      positives_discovered_cumulative: 9,
    },
  ],
};

describe("dashboard view-models", () => {
  it("metric series pass server values through unchanged", () => {
    const series = metricSeries(METRICS);
    expect(series.map((s) => s.name)).toEqual([
      "precision",
      "recall",
      "f1",
      "accuracy",
      "specificity",
    ]);
    const precision = series[0]!;
    expect(precision.points).toEqual([
      [1, 0.5],
      [2, 0.9],
    ]);
    const f1 = series[2]!;
    expect(f1.points).toEqual([
      [1, 0.333],
      [2, 0.847],
    ]);
  });

  it("discovery series mirrors the server curve", () => {
    const series = discoverySeries({ curve: [[1, 4], [2, 9]] });
    expect(series.points).toEqual([
      [1, 4],
      [2, 9],
    ]);
  });

  it("curve series zips xs and ys", () => {
    const series = curveSeries("ROC", {
      thresholds: [null, 0.9, 0.1],
      xs: [0, 0.2, 1],
      ys: [0, 0.8, 1],
      area: 0.9,
    });
    expect(series.points).toEqual([
      [0, 0],
      [0.2, 0.8],
      [1, 1],
    ]);
  });

  it("kb rows render the relation text and fixed-precision confidence", () => {
    const rows = kbRows({
      triples: [
        {
          food: "apple",
          part: "skin",
          chemical: "quercetin",
          confidence: 1,
          evidence_count: 2,
          source_docs: ["PMID:1", "PMID:2"],
        },
        {
          food: "grape",
          part: null,
          chemical: "resveratrol",
          confidence: 0.8125,
          evidence_count: 1,
          source_docs: ["PMID:3"],
        },
      ],
    });
    expect(rows[0]).toEqual({
      relation: "apple skin contains quercetin",
      confidence: "1.000000",
      evidence: 2,
      sources: "PMID:1; PMID:2",
    });
    expect(rows[1]?.relation).toBe("grape contains resveratrol");
  });

  it("progress text lists annotators alphabetically", () => {
    expect(progressText({ bob: 3, alice: 10 }, 10)).toBe("alice: 10/10  bob: 3/10");
  });
});

describe("keyboard mapping", () => {
  it("maps 1/2/3 to the three classes", () => {
    expect(keyToLabel("1")).toBe("positive");
    expect(keyToLabel("2")).toBe("negative");
    expect(keyToLabel("3")).toBe("skip");
  });

  it("ignores other keys", () => {
    expect(keyToLabel("x")).toBeNull();
    expect(keyToLabel("Enter")).toBeNull();
  });
});
