/** Experiment draft state: clone, edit, validate; no scoring math lives here. */

import { DIMENSIONS } from "./model.js";
import type { ExperimentDoc, RelationDoc, ScaleDoc } from "./model.js";

export interface ValidationIssue {
  field: string;
  message: string;
}

export type Draft = ExperimentDoc;

function cloneRelations(relations: RelationDoc[]): RelationDoc[] {
  return relations.map((relation) => ({ ...relation }));
}

function cloneScale(scale: ScaleDoc): ScaleDoc {
  return { p: [...scale.p], post_divisor: scale.post_divisor };
}

export function draftFromExperiment(doc: ExperimentDoc): Draft {
  const mappings: Record<string, RelationDoc[]> = {};
  for (const [dimension, relations] of Object.entries(doc.mappings)) {
    mappings[dimension] = cloneRelations(relations);
  }
  const draft: Draft = {
    id: doc.id,
    label: doc.label,
    scalar: doc.scalar,
    scale: cloneScale(doc.scale),
    mappings,
  };
  if (doc.created_at !== undefined) {
    draft.created_at = doc.created_at;
  }
  return draft;
}

/** Serialise a draft for PUT; an untouched draft round-trips structurally. */
export function draftToBody(draft: Draft): ExperimentDoc {
  return draftFromExperiment(draft);
}

/**
 * Clone an experiment into a new draft for the next training iteration.
 * Everything is kept except the id, optional label, and, when given, the
 * post-divisor or the whole scale vector.
 */
export function cloneExperiment(
  source: ExperimentDoc,
  newId: string,
  options: { postDivisor?: number; label?: string; scale?: ScaleDoc } = {},
): Draft {
  const draft = draftFromExperiment(source);
  draft.id = newId;
  delete draft.created_at;
  if (options.label !== undefined) {
    draft.label = options.label;
  }
  if (options.scale !== undefined) {
    draft.scale = cloneScale(options.scale);
  }
  if (options.postDivisor !== undefined) {
    draft.scale.post_divisor = options.postDivisor;
  }
  return draft;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

export function validateDraft(draft: Draft): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (!draft.id.trim()) {
    issues.push({ field: "id", message: "experiment id must not be empty" });
  }
  if (!isFiniteNumber(draft.scalar) || draft.scalar <= 0) {
    issues.push({ field: "scalar", message: "scalar must be a number > 0" });
  }
  if (draft.scale.p.length !== DIMENSIONS.length) {
    issues.push({ field: "scale", message: `scale needs ${DIMENSIONS.length} entries` });
  }
  draft.scale.p.forEach((entry, index) => {
    if (!isFiniteNumber(entry) || entry < 0) {
      issues.push({ field: `scale.p[${index}]`, message: "scale entries must be >= 0" });
    }
  });
  if (!isFiniteNumber(draft.scale.post_divisor) || draft.scale.post_divisor <= 0) {
    issues.push({ field: "scale.post_divisor", message: "post divisor must be > 0" });
  }

  const present = Object.keys(draft.mappings);
  for (const dimension of DIMENSIONS) {
    if (!present.includes(dimension)) {
      issues.push({ field: dimension, message: `missing mapping for ${dimension}` });
    }
  }
  for (const extra of present) {
    if (!(DIMENSIONS as readonly string[]).includes(extra)) {
      issues.push({ field: extra, message: `unknown dimension ${extra}` });
    }
  }

  for (const [dimension, relations] of Object.entries(draft.mappings)) {
    const seen = new Set<string>();
    relations.forEach((relation, index) => {
      const where = `${dimension}[${index}]`;
      if (!relation.name.trim()) {
        issues.push({ field: where, message: "relation name must not be empty" });
      } else if (seen.has(relation.name)) {
        issues.push({ field: where, message: `duplicate relation name '${relation.name}'` });
      }
      seen.add(relation.name);
      if (!relation.pattern.trim()) {
        issues.push({ field: where, message: "pattern must not be empty" });
      }
      if (relation.kind !== "tag" && relation.kind !== "keyword") {
        issues.push({ field: where, message: "kind must be tag or keyword" });
      }
      if (!isFiniteNumber(relation.weight) || relation.weight < 0) {
        issues.push({ field: where, message: "weight must be a number >= 0" });
      }
    });
  }
  return issues;
}

/** Deep structural equality for experiment documents (key order ignored). */
export function sameExperiment(a: ExperimentDoc, b: ExperimentDoc): boolean {
  if (
    a.id !== b.id ||
    a.label !== b.label ||
    a.scalar !== b.scalar ||
    a.scale.post_divisor !== b.scale.post_divisor ||
    a.scale.p.length !== b.scale.p.length ||
    a.scale.p.some((value, index) => value !== b.scale.p[index])
  ) {
    return false;
  }
  const aDims = Object.keys(a.mappings).sort();
  const bDims = Object.keys(b.mappings).sort();
  if (aDims.length !== bDims.length || aDims.some((d, i) => d !== bDims[i])) {
    return false;
  }
  for (const dimension of aDims) {
    const left = a.mappings[dimension] ?? [];
    const right = b.mappings[dimension] ?? [];
    if (left.length !== right.length) {
      return false;
    }
    for (let i = 0; i < left.length; i += 1) {
      const x = left[i];
      const y = right[i];
      if (!x || !y) {
        return false;
      }
      if (x.name !== y.name || x.kind !== y.kind || x.pattern !== y.pattern || x.weight !== y.weight) {
        return false;
      }
    }
  }
  return true;
}

export interface StudioState {
  token: string;
  role: "administrator" | "researcher";
  experiments: ExperimentDoc[];
  draft: Draft | null;
  selectedRunId: string | null;
}

export function initialState(): StudioState {
  return {
    token: "",
    role: "researcher",
    experiments: [],
    draft: null,
    selectedRunId: null,
  };
}
