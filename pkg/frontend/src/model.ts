/** Shared wire types mirroring the octoscore HTTP API. */

export const DIMENSIONS = [
  "Context",
  "Content",
  "Community",
  "Customization",
  "Communication",
  "Connection",
  "Commerce",
  "Collaboration",
] as const;

export type Dimension = (typeof DIMENSIONS)[number];

export type RelationKind = "tag" | "keyword";

export interface RelationDoc {
  name: string;
  kind: RelationKind;
  pattern: string;
  weight: number;
}

export interface ScaleDoc {
  p: number[];
  post_divisor: number;
}

export interface ExperimentDoc {
  id: string;
  label: string;
  scalar: number;
  scale: ScaleDoc;
  created_at?: string;
  mappings: Record<string, RelationDoc[]>;
}

export interface DimensionScoreDoc {
  dimension: string;
  subtotal: number;
  relation_scores: [string, number][];
}

export interface SiteScoreDoc {
  site: string;
  experiment_id: string;
  total_raw: number;
  total_scaled: number;
  dimensions: DimensionScoreDoc[];
}

export interface ContributionRowDoc {
  dimension: string;
  attribute_count: number;
  contribution_pct: number;
  std_dev: number;
  mean_subtotal: number;
}

export interface AdviceDoc {
  kind: string;
  dimension: string | null;
  relation: string | null;
  value: number | null;
  message: string;
}

export interface RankDiffEntryDoc {
  site: string;
  expected_rank: number;
  actual_rank: number;
  abs_diff: number;
}

export interface RankDiffDoc {
  per_site: RankDiffEntryDoc[];
  mean_abs_diff: number;
}

export interface RunDetail {
  run_id: string;
  status: "pending" | "done";
  experiment_id?: string;
  started_at?: string;
  site_scores?: SiteScoreDoc[];
  failures?: [string, string][];
  contributions?: ContributionRowDoc[] | null;
  advices?: AdviceDoc[] | null;
  rank_diff?: RankDiffDoc | null;
  rank_diff_error?: string | null;
  suggested_scale?: ScaleDoc | null;
}

export interface RunSummary {
  run_id: string;
  experiment_id: string;
  status: string;
  started_at?: string;
  site_count?: number;
  failure_count?: number;
}

export interface RunRequest {
  experiment_id: string;
  sites: string[];
  ground_truth_csv?: string;
}
