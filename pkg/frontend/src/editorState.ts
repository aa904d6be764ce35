// Editor view state and a pure undo/redo stack. Every transition returns a
// new value, so undo(apply(h, s)) restores h exactly.

import { sentences } from "./segment.js";
import type { LockSpan, SessionView } from "./types.js";

export const MATCH_WINDOW = 50;

export type GaugeValue = {
  score: number | null;
  unscorable: boolean;
};

export type EditorState = {
  readonly workingText: string;
  readonly sentences: readonly string[];
  readonly locks: readonly LockSpan[];
  readonly targetScore: number;
  readonly gauge: GaugeValue;
  readonly staged: readonly number[];
};

export const fromView = (view: SessionView): EditorState => ({
  workingText: view.working_text,
  sentences: sentences(view.working_text),
  locks: view.locks,
  targetScore: view.target_score,
  gauge: {
    score: view.report ? view.report.score : null,
    unscorable: view.unscorable,
  },
  staged: [],
});

export const withText = (state: EditorState, workingText: string): EditorState => ({
  ...state,
  workingText,
  sentences: sentences(workingText),
});

export const withGauge = (state: EditorState, gauge: GaugeValue): EditorState => ({
  ...state,
  gauge,
});

export const band = (state: EditorState): [number, number] => [
  state.targetScore - MATCH_WINDOW,
  state.targetScore + MATCH_WINDOW,
];

export const inBand = (state: EditorState): boolean =>
  state.gauge.score !== null &&
  Math.abs(state.gauge.score - state.targetScore) <= MATCH_WINDOW;

export type History<S> = {
  readonly past: readonly S[];
  readonly present: S;
  readonly future: readonly S[];
};

export const history = <S>(present: S): History<S> => ({
  past: [],
  present,
  future: [],
});

export const apply = <S>(h: History<S>, next: S): History<S> => ({
  past: [...h.past, h.present],
  present: next,
  future: [],
});

export const undo = <S>(h: History<S>): History<S> =>
  h.past.length === 0
    ? h
    : {
        past: h.past.slice(0, -1),
        present: h.past[h.past.length - 1],
        future: [h.present, ...h.future],
      };

export const redo = <S>(h: History<S>): History<S> =>
  h.future.length === 0
    ? h
    : {
        past: [...h.past, h.present],
        present: h.future[0],
        future: h.future.slice(1),
      };
