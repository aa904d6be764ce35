// Live readability gauge. Keystrokes are debounced; replies are applied
// last-write-wins by request sequence number, so a slow early response can
// never overwrite a newer score.

import type { GaugeValue } from "./editorState.js";
import type { ReadabilityReport } from "./types.js";

export const DEBOUNCE_MS = 250;

type ScoreFn = (text: string) => Promise<ReadabilityReport>;

export class ScoreGauge {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private applied = 0;

  constructor(
    private readonly score: ScoreFn,
    private readonly onChange: (value: GaugeValue) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  textChanged(text: string): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.request(text);
    }, this.debounceMs);
  }

  // Immediate request, bypassing the debounce (used after merges and undo).
  refresh(text: string): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.request(text);
  }

  private request(text: string): void {
    this.seq += 1;
    const seq = this.seq;
    this.score(text).then(
      (report) => this.accept(seq, { score: report.score, unscorable: false }),
      () => this.accept(seq, { score: null, unscorable: true }),
    );
  }

  private accept(seq: number, value: GaugeValue): void {
    if (seq < this.applied) return;
    this.applied = seq;
    this.onChange(value);
  }
}
