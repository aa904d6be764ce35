// Merge staging. The client stages link ids and ships them with the
// alignment digest it was given; the server re-checks locks and staleness,
// and a refusal rolls the stage back visibly instead of half-applying.

import { ApiError } from "./api.js";
import type { AlignmentMap, Replacement, SessionView } from "./types.js";

export type MergeStage = {
  readonly candidateText: string;
  readonly map: AlignmentMap;
  readonly staged: readonly number[];
  readonly rejected: readonly number[];
};

export type MergeOutcome =
  | { kind: "merged"; view: SessionView }
  | { kind: "locked"; stage: MergeStage }
  | { kind: "stale"; stage: MergeStage };

export const openStage = (candidateText: string, map: AlignmentMap): MergeStage => ({
  candidateText,
  map,
  staged: [],
  rejected: [],
});

export const toggle = (stage: MergeStage, linkId: number): MergeStage => {
  if (!stage.map.links.some((link) => link.link_id === linkId)) return stage;
  const staged = stage.staged.includes(linkId)
    ? stage.staged.filter((id) => id !== linkId)
    : [...stage.staged, linkId];
  return { ...stage, staged, rejected: [] };
};

export type MergeBody = {
  candidate: string;
  replacements: Replacement[];
  alignment_digest: string;
};

export const mergeBody = (stage: MergeStage): MergeBody => ({
  candidate: stage.candidateText,
  replacements: [...stage.staged]
    .sort((a, b) => a - b)
    .map((link_id) => ({ link_id })),
  alignment_digest: stage.map.similarity_matrix_digest,
});

type CommitFn = (body: MergeBody) => Promise<SessionView>;

export const commitMerge = async (
  stage: MergeStage,
  commit: CommitFn,
): Promise<MergeOutcome> => {
  try {
    const view = await commit(mergeBody(stage));
    return { kind: "merged", view };
  } catch (err) {
    if (err instanceof ApiError && err.code === "lock_violation") {
      const refused = new Set(err.linkIds);
      return {
        kind: "locked",
        stage: {
          ...stage,
          staged: stage.staged.filter((id) => !refused.has(id)),
          rejected: err.linkIds,
        },
      };
    }
    if (err instanceof ApiError && err.code === "stale_alignment") {
      return { kind: "stale", stage: { ...stage, staged: [], rejected: [] } };
    }
    throw err;
  }
};
