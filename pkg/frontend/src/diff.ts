// Diff rows for the merge panel, plus mirrors of the server's per-sentence
// edit attribution and Gini dispersion. The mirrors aggregate numbers the
// server already returned (per-link edit distances); they invent none.

import { segmentSpans } from "./segment.js";
import type { AlignmentLink, AlignmentMap, LockSpan } from "./types.js";

export type DiffRow = {
  readonly linkId: number;
  readonly label: AlignmentLink["label"];
  readonly base: string;
  readonly candidate: string;
  readonly editDistance: number;
  readonly staged: boolean;
  readonly lockedConflict: boolean;
};

// A link's distance lands on its first source sentence; an insertion lands on
// the nearest preceding source sentence, or sentence 0 when it precedes all.
export const perSourceDistances = (
  map: AlignmentMap,
  sourceCount: number,
): number[] => {
  if (sourceCount === 0) return [];
  const distances = new Array<number>(sourceCount).fill(0);
  let lastSeen = 0;
  for (const link of map.links) {
    if (link.source.length > 0) {
      distances[link.source[0]] += link.edit_distance;
      lastSeen = link.source[link.source.length - 1];
    } else {
      distances[lastSeen] += link.edit_distance;
    }
  }
  return distances;
};

export const gini = (values: readonly number[]): number => {
  const n = values.length;
  if (n === 0) return 0;
  const total = values.reduce((a, b) => a + b, 0);
  if (total === 0) return 0;
  const ordered = [...values].sort((a, b) => a - b);
  let weighted = 0;
  ordered.forEach((x, rank) => {
    weighted += (2 * (rank + 1) - n - 1) * x;
  });
  return weighted / (n * total);
};

// Null rather than an exception: a one-sentence base has no dispersion badge.
export const editDispersion = (
  map: AlignmentMap,
  sourceCount: number,
): number | null => {
  if (sourceCount < 2) return null;
  return gini(perSourceDistances(map, sourceCount));
};

const overlapsLock = (start: number, end: number, locks: readonly LockSpan[]): boolean =>
  locks.some(
    (lock) =>
      (start < lock.end && lock.start < end) ||
      (start === end && lock.start < start && start < lock.end),
  );

// Mirror of the server's lock check, used to pre-flag rows. The server's 409
// on commit stays authoritative.
const lockedConflicts = (
  map: AlignmentMap,
  baseText: string,
  locks: readonly LockSpan[],
): Set<number> => {
  const conflicts = new Set<number>();
  if (locks.length === 0) return conflicts;
  const spans = segmentSpans(baseText);
  let lastEnd: number | null = null;
  for (const link of map.links) {
    if (link.source.length > 0) {
      const start = spans[link.source[0]][0];
      const end = spans[link.source[link.source.length - 1]][1];
      lastEnd = end;
      if (overlapsLock(start, end, locks)) conflicts.add(link.link_id);
    } else {
      const anchor = lastEnd ?? (spans.length > 0 ? spans[0][0] : 0);
      if (overlapsLock(anchor, anchor, locks)) conflicts.add(link.link_id);
    }
  }
  return conflicts;
};

export const diffRows = (
  map: AlignmentMap,
  baseText: string,
  candidateText: string,
  staged: ReadonlySet<number>,
  locks: readonly LockSpan[] = [],
): DiffRow[] => {
  const baseSpans = segmentSpans(baseText);
  const candSpans = segmentSpans(candidateText);
  const baseSentence = (i: number): string => {
    const [start, end] = baseSpans[i];
    return baseText.slice(start, end);
  };
  const candSentence = (i: number): string => {
    const [start, end] = candSpans[i];
    return candidateText.slice(start, end);
  };
  const conflicts = lockedConflicts(map, baseText, locks);
  return map.links.map((link) => ({
    linkId: link.link_id,
    label: link.label,
    base: link.source.map(baseSentence).join(" "),
    candidate: link.candidate.map(candSentence).join(" "),
    editDistance: link.edit_distance,
    staged: staged.has(link.link_id),
    lockedConflict: conflicts.has(link.link_id),
  }));
};
