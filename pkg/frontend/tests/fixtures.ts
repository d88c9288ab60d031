import { DIMENSIONS } from "../src/model.js";
import type { ExperimentDoc, RunDetail } from "../src/model.js";

/** A full eight-dimension experiment document, exp9-style scale included. */
export function makeExperiment(id = "exp9", postDivisor = 1): ExperimentDoc {
  const mappings: ExperimentDoc["mappings"] = {};
  for (const dimension of DIMENSIONS) {
    mappings[dimension] = [
      { name: `${dimension} tag`, kind: "tag", pattern: "div", weight: 1 },
      { name: `${dimension} word`, kind: "keyword", pattern: dimension.toLowerCase(), weight: 2 },
    ];
  }
  mappings["Collaboration"] = [
    { name: "Forums", kind: "keyword", pattern: "forums", weight: 3 },
    { name: "Bulletin boards", kind: "keyword", pattern: "bulletin boards", weight: 3 },
    { name: "FAQ", kind: "keyword", pattern: "faq", weight: 3 },
    { name: "Feedback", kind: "keyword", pattern: "feedback", weight: 5 },
  ];
  return {
    id,
    label: "fixture experiment",
    scalar: 100,
    scale: { p: [1, 4, 4, 4, 4, 4, 3, 9], post_divisor: postDivisor },
    created_at: "2026-08-11T00:00:00+00:00",
    mappings,
  };
}

export function makeDoneRun(overrides: Partial<RunDetail> = {}): RunDetail {
  return {
    run_id: "exp9-run-1",
    status: "done",
    experiment_id: "exp9",
    started_at: "2026-08-11T10:00:00+00:00",
    site_scores: [
      {
        site: "a.html",
        experiment_id: "exp9",
        total_raw: 52.5,
        total_scaled: 34.0,
        dimensions: DIMENSIONS.map((dimension, index) => ({
          dimension,
          subtotal: index + 1.5,
          relation_scores: [[`${dimension} word`, index + 1.5]],
        })),
      },
    ],
    failures: [],
    contributions: DIMENSIONS.map((dimension, index) => ({
      dimension,
      attribute_count: index === 7 ? 7 : 2,
      contribution_pct: dimension === "Context" ? 40.94 : (100 - 40.94) / 7,
      std_dev: dimension === "Collaboration" ? 1.97 : 5.5,
      mean_subtotal: 10,
    })),
    advices: [
      {
        kind: "dimension_dominates",
        dimension: "Context",
        relation: null,
        value: 40.94,
        message: "Context contributes 40.94% of the run total; scale it down.",
      },
      {
        kind: "low_dispersion",
        dimension: "Collaboration",
        relation: null,
        value: 1.97,
        message: "Collaboration has the lowest spread despite 7 relations.",
      },
      {
        kind: "recheck_mappings",
        dimension: null,
        relation: null,
        value: null,
        message: "Re-examine every dimension's relation list.",
      },
    ],
    rank_diff: {
      per_site: [
        { site: "a.html", expected_rank: 1, actual_rank: 2, abs_diff: 1 },
        { site: "b.html", expected_rank: 2, actual_rank: 1, abs_diff: 1 },
      ],
      mean_abs_diff: 1.0,
    },
    rank_diff_error: null,
    suggested_scale: { p: [1, 2.5, 2.5, 2.5, 2.5, 2.5, 2, 7.5], post_divisor: 10 },
    ...overrides,
  };
}
