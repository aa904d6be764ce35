// Candidate cards for the browse panel. Numbers come straight off the
// server's evaluation record; the only client arithmetic is the distance
// between two scores it already returned.

import type { BankCandidate } from "./types.js";

const SNIPPET_CHARS = 120;

export type CandidateCard = {
  readonly candidateId: string;
  readonly provider: string;
  readonly method: string;
  readonly resultingScore: number | null;
  readonly distanceToTarget: number;
  readonly editDispersion: number | null;
  readonly snippet: string;
  readonly text: string;
};

export const snippet = (text: string): string => {
  const flat = text.replace(/\s+/g, " ").trim();
  if (flat.length <= SNIPPET_CHARS) return flat;
  return flat.slice(0, SNIPPET_CHARS - 1).trimEnd() + "…";
};

export const toCard = (
  candidate: BankCandidate,
  editDispersion: number | null = null,
): CandidateCard => {
  const ev = candidate.evaluation;
  const distance =
    ev.resulting_score === null || ev.intended_score === null
      ? Infinity
      : Math.abs(ev.resulting_score - ev.intended_score);
  return {
    candidateId: candidate.candidate_id,
    provider: candidate.provider,
    method: candidate.method,
    resultingScore: ev.resulting_score,
    distanceToTarget: distance,
    editDispersion,
    snippet: snippet(candidate.output_text),
    text: candidate.output_text,
  };
};

// The bank already orders candidates by distance to target; keep that order.
export const cards = (candidates: readonly BankCandidate[]): CandidateCard[] =>
  candidates.map((c) => toCard(c));
