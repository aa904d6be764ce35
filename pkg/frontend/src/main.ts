// Single-page workbench wiring. All state transitions flow through the pure
// helpers (editorState, merge, diff); this file only touches the DOM and the
// API client, so every number on screen traces back to a server response.

import { ApiClient, ApiError } from "./api.js";
import { toCard } from "./candidates.js";
import { diffRows, editDispersion } from "./diff.js";
import {
  apply as pushState,
  band,
  fromView,
  history,
  inBand,
  undo as popState,
  withGauge,
  withText,
  type EditorState,
  type History,
} from "./editorState.js";
import { ScoreGauge } from "./gauge.js";
import { commitMerge, openStage, toggle, type MergeStage } from "./merge.js";
import { segmentSpans } from "./segment.js";
import type { BankCandidate, LockSpan, RunReportRow, SessionView } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const pairInput = $<HTMLInputElement>("pair-input");
const openBtn = $<HTMLButtonElement>("open-session");
const sessionLabel = $<HTMLSpanElement>("session-label");
const gaugeEl = $<HTMLDivElement>("gauge");
const gaugeBand = $<HTMLDivElement>("gauge-band");
const gaugeNeedle = $<HTMLDivElement>("gauge-needle");
const gaugeScore = $<HTMLSpanElement>("gauge-score");
const gaugeTarget = $<HTMLSpanElement>("gauge-target");
const filterProvider = $<HTMLInputElement>("filter-provider");
const filterMethod = $<HTMLInputElement>("filter-method");
const filterMin = $<HTMLInputElement>("filter-min");
const filterMax = $<HTMLInputElement>("filter-max");
const refreshBtn = $<HTMLButtonElement>("refresh-bank");
const genProvider = $<HTMLInputElement>("gen-provider");
const genMethod = $<HTMLSelectElement>("gen-method");
const genK = $<HTMLInputElement>("gen-k");
const generateBtn = $<HTMLButtonElement>("generate");
const cardList = $<HTMLDivElement>("card-list");
const emptyBank = $<HTMLDivElement>("empty-bank");
const editor = $<HTMLTextAreaElement>("editor");
const sentenceList = $<HTMLOListElement>("sentence-list");
const applyEditBtn = $<HTMLButtonElement>("apply-edit");
const undoLocalBtn = $<HTMLButtonElement>("undo-local");
const revertMergeBtn = $<HTMLButtonElement>("revert-merge");
const lockStart = $<HTMLInputElement>("lock-start");
const lockEnd = $<HTMLInputElement>("lock-end");
const lockReason = $<HTMLInputElement>("lock-reason");
const addLockBtn = $<HTMLButtonElement>("add-lock");
const clearLocksBtn = $<HTMLButtonElement>("clear-locks");
const mergePanel = $<HTMLElement>("merge-panel");
const mergeSource = $<HTMLSpanElement>("merge-source");
const mergeDispersion = $<HTMLSpanElement>("merge-dispersion");
const commitBtn = $<HTMLButtonElement>("commit-merge");
const closeMergeBtn = $<HTMLButtonElement>("close-merge");
const diffRowsEl = $<HTMLDivElement>("diff-rows");
const reportPanel = $<HTMLElement>("report-panel");
const reportTitle = $<HTMLHeadingElement>("report-title");
const reportTable = $<HTMLTableElement>("report-table");
const toastEl = $<HTMLDivElement>("toast");

const client = new ApiClient();

let sessionId: string | null = null;
// Authoritative working text: changes only through merge and server undo.
let serverText = "";
let states: History<EditorState> | null = null;
// Snapshot taken at the first keystroke of an edit burst, so the whole burst
// becomes one undo step when focus leaves the editor.
let editBase: EditorState | null = null;
let stage: MergeStage | null = null;
let stageCandidateId: string | null = null;
let bank: BankCandidate[] = [];

let toastTimer: ReturnType<typeof setTimeout> | null = null;
const toast = (message: string, isError = false): void => {
  toastEl.textContent = message;
  toastEl.className = `toast show${isError ? " error" : ""}`;
  if (toastTimer !== null) clearTimeout(toastTimer);
  toastTimer = setTimeout(() => {
    toastEl.className = "toast";
  }, 2600);
};

const describe = (err: unknown): string =>
  err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);

const badge = (text: string, extraClass = ""): HTMLSpanElement => {
  const span = document.createElement("span");
  span.className = extraClass ? `badge ${extraClass}` : "badge";
  span.textContent = text;
  return span;
};

// Plotted window around the target; the band itself stays exactly target +/- 50.
const GAUGE_SPAN = 400;

const renderGauge = (): void => {
  if (!states) return;
  const s = states.present;
  const [lo, hi] = band(s);
  const min = s.targetScore - GAUGE_SPAN;
  const max = s.targetScore + GAUGE_SPAN;
  const pct = (v: number): number =>
    Math.min(100, Math.max(0, ((v - min) / (max - min)) * 100));
  gaugeBand.style.left = `${pct(lo)}%`;
  gaugeBand.style.width = `${pct(hi) - pct(lo)}%`;
  const g = s.gauge;
  if (g.unscorable) {
    gaugeScore.textContent = "unscorable";
    gaugeScore.className = "gauge-score unscorable";
    gaugeNeedle.style.display = "none";
  } else if (g.score === null) {
    gaugeScore.textContent = "–";
    gaugeScore.className = "gauge-score";
    gaugeNeedle.style.display = "none";
  } else {
    gaugeScore.textContent = g.score.toFixed(1);
    gaugeScore.className = `gauge-score ${inBand(s) ? "in-band" : "out-band"}`;
    gaugeNeedle.style.display = "";
    gaugeNeedle.style.left = `calc(${pct(g.score)}% - 1px)`;
  }
  gaugeTarget.textContent = `target ${s.targetScore.toFixed(1)} ± 50`;
};

const renderSentences = (): void => {
  if (!states) return;
  const s = states.present;
  sentenceList.replaceChildren();
  for (const [start, end] of segmentSpans(s.workingText)) {
    const li = document.createElement("li");
    li.textContent = s.workingText.slice(start, end);
    const lock = s.locks.find((l) => start < l.end && l.start < end);
    if (lock) {
      li.classList.add("locked");
      li.title = lock.reason ? `locked: ${lock.reason}` : "locked";
    }
    sentenceList.append(li);
  }
};

// Adopt a server view as a new undoable state.
const adoptView = (view: SessionView): void => {
  serverText = view.working_text;
  editBase = null;
  const next = fromView(view);
  states = states ? pushState(states, next) : history(next);
  editor.value = view.working_text;
  sessionLabel.textContent =
    `session ${view.session_id} · pair ${view.pair_id} · ` +
    `source ${view.source_score.toFixed(1)} → target ${view.target_score.toFixed(1)}`;
  renderGauge();
  renderSentences();
};

// Gauge replies replace the present without a history push: an async score is
// a derived reading, not a curator action to undo.
const gauge = new ScoreGauge(
  (text) => client.score(text),
  (value) => {
    if (!states) return;
    states = { ...states, present: withGauge(states.present, value) };
    renderGauge();
  },
);

const closeMergePanel = (): void => {
  stage = null;
  stageCandidateId = null;
  mergePanel.classList.add("hidden");
  renderCards();
};

const fillDispersion = async (
  candidate: BankCandidate,
  el: HTMLElement,
): Promise<void> => {
  try {
    const map = await client.align(serverText, candidate.output_text);
    const d = editDispersion(map, segmentSpans(serverText).length);
    el.textContent = d === null ? "disp n/a" : `disp ${d.toFixed(2)}`;
  } catch {
    el.textContent = "disp n/a";
  }
};

const renderCards = (): void => {
  cardList.replaceChildren();
  emptyBank.classList.toggle("hidden", bank.length > 0 || sessionId === null);
  for (const candidate of bank) {
    const card = toCard(candidate);
    const div = document.createElement("div");
    div.className = "card";
    if (card.candidateId === stageCandidateId) div.classList.add("open");
    const top = document.createElement("div");
    top.className = "card-top";
    const dispBadge = badge("disp …");
    void fillDispersion(candidate, dispBadge);
    const score = document.createElement("span");
    score.className = "card-score";
    score.textContent =
      card.resultingScore === null ? "–" : card.resultingScore.toFixed(1);
    const dist = document.createElement("span");
    dist.className = "card-dist";
    dist.textContent = Number.isFinite(card.distanceToTarget)
      ? `Δ ${card.distanceToTarget.toFixed(1)}`
      : "Δ –";
    top.append(badge(card.provider), badge(card.method), dispBadge, score, dist);
    const snippet = document.createElement("div");
    snippet.className = "card-snippet";
    snippet.textContent = card.snippet;
    div.append(top, snippet);
    div.addEventListener("click", () => void openCandidate(candidate));
    cardList.append(div);
  }
};

const refreshBank = async (): Promise<void> => {
  if (!sessionId) return;
  try {
    bank = await client.bank({
      pair_id: pairInput.value.trim(),
      provider: filterProvider.value.trim() || undefined,
      method: filterMethod.value.trim() || undefined,
      min_score: filterMin.value === "" ? undefined : Number(filterMin.value),
      max_score: filterMax.value === "" ? undefined : Number(filterMax.value),
    });
  } catch (err) {
    toast(describe(err), true);
    return;
  }
  renderCards();
};

const stageToggle = (linkId: number): void => {
  if (!stage || !states) return;
  stage = toggle(stage, linkId);
  // Staging is a curator action, so it lands on the undo stack.
  states = pushState(states, { ...states.present, staged: stage.staged });
  renderDiff();
};

const renderDiff = (rejected: readonly number[] = []): void => {
  if (!stage || !states) return;
  diffRowsEl.replaceChildren();
  const rejectedSet = new Set(rejected);
  const rows = diffRows(
    stage.map,
    serverText,
    stage.candidateText,
    new Set(stage.staged),
    states.present.locks,
  );
  for (const row of rows) {
    const div = document.createElement("div");
    div.className = `diff-row label-${row.label}`;
    if (row.staged) div.classList.add("staged");
    if (row.lockedConflict) div.classList.add("locked-conflict");
    if (rejectedSet.has(row.linkId)) div.classList.add("rejected");
    const head = document.createElement("div");
    head.className = "diff-head";
    const dist = document.createElement("span");
    dist.className = "diff-dist";
    dist.textContent = `edits ${row.editDistance}`;
    head.append(badge(row.label, `label-${row.label}`), badge(`link ${row.linkId}`), dist);
    const base = document.createElement("div");
    base.className = "diff-base drop-target";
    base.textContent = row.base || "(empty)";
    const cand = document.createElement("div");
    cand.className = "diff-cand";
    cand.textContent = row.candidate || "(delete)";
    cand.draggable = true;
    cand.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/plain", String(row.linkId));
    });
    base.addEventListener("dragover", (ev) => {
      ev.preventDefault();
      base.classList.add("drag-over");
    });
    base.addEventListener("dragleave", () => base.classList.remove("drag-over"));
    base.addEventListener("drop", (ev) => {
      ev.preventDefault();
      base.classList.remove("drag-over");
      if (!stage) return;
      const dropped = Number(ev.dataTransfer?.getData("text/plain"));
      if (dropped !== row.linkId) {
        toast("drop onto the aligned slot", true);
        return;
      }
      if (!stage.staged.includes(row.linkId)) stageToggle(row.linkId);
    });
    div.addEventListener("click", () => stageToggle(row.linkId));
    div.append(head, base, cand);
    diffRowsEl.append(div);
  }
  commitBtn.disabled = stage.staged.length === 0;
};

const openCandidate = async (candidate: BankCandidate): Promise<void> => {
  if (!sessionId) return;
  try {
    const map = await client.align(serverText, candidate.output_text);
    stage = openStage(candidate.output_text, map);
    stageCandidateId = candidate.candidate_id;
    mergeSource.textContent =
      `${candidate.provider} · ${candidate.method} · ${candidate.candidate_id.slice(0, 8)}`;
    const disp = editDispersion(map, segmentSpans(serverText).length);
    mergeDispersion.textContent =
      disp === null ? "dispersion n/a" : `dispersion ${disp.toFixed(2)}`;
    mergePanel.classList.remove("hidden");
    renderDiff();
    renderCards();
  } catch (err) {
    toast(describe(err), true);
  }
};

const doCommit = async (): Promise<void> => {
  const sid = sessionId;
  if (!stage || !sid) return;
  const current = stage;
  let outcome;
  try {
    outcome = await commitMerge(current, (body) => client.merge(sid, body));
  } catch (err) {
    toast(describe(err), true);
    return;
  }
  if (outcome.kind === "merged") {
    adoptView(outcome.view);
    gauge.refresh(outcome.view.working_text);
    closeMergePanel();
    toast("merged one candidate");
    await refreshBank();
  } else if (outcome.kind === "locked") {
    stage = outcome.stage;
    renderDiff(outcome.stage.rejected);
    toast(`locked span refused links ${outcome.stage.rejected.join(", ")}`, true);
  } else {
    try {
      const map = await client.align(serverText, current.candidateText);
      stage = openStage(current.candidateText, map);
      renderDiff();
      toast("alignment was stale; reloaded", true);
    } catch (err) {
      toast(describe(err), true);
    }
  }
};

const applyEdit = async (): Promise<void> => {
  const sid = sessionId;
  if (!sid || !states) return;
  const edited = editor.value;
  if (edited === serverText) {
    toast("no changes to apply");
    return;
  }
  try {
    const map = await client.align(serverText, edited);
    const changed = map.links
      .filter((l) => l.label !== "unchanged")
      .map((l) => ({ link_id: l.link_id }));
    const view = await client.merge(sid, {
      candidate: edited,
      replacements: changed,
      alignment_digest: map.similarity_matrix_digest,
    });
    adoptView(view);
    gauge.refresh(view.working_text);
    toast(`applied ${changed.length} change${changed.length === 1 ? "" : "s"}`);
  } catch (err) {
    if (err instanceof ApiError && err.code === "lock_violation") {
      toast(`edit touches a locked span (links ${err.linkIds.join(", ")})`, true);
    } else {
      toast(describe(err), true);
    }
  }
};

const undoLocal = (): void => {
  if (!states || states.past.length === 0) {
    toast("nothing to undo locally");
    return;
  }
  states = popState(states);
  editBase = null;
  const s = states.present;
  editor.value = s.workingText;
  if (stage) stage = { ...stage, staged: [...s.staged], rejected: [] };
  renderGauge();
  renderSentences();
  renderDiff();
  gauge.refresh(s.workingText);
};

const revertMerge = async (): Promise<void> => {
  const sid = sessionId;
  if (!sid) return;
  try {
    const view = await client.undo(sid);
    adoptView(view);
    gauge.refresh(view.working_text);
    closeMergePanel();
    toast("reverted last server change");
  } catch (err) {
    if (err instanceof ApiError && err.code === "nothing_to_undo") {
      toast("nothing to revert");
    } else {
      toast(describe(err), true);
    }
  }
};

const setLocks = async (spans: LockSpan[]): Promise<void> => {
  const sid = sessionId;
  if (!sid) return;
  try {
    await client.setLocks(sid, spans);
    adoptView(await client.getSession(sid));
    toast(spans.length === 0 ? "locks cleared" : `${spans.length} lock(s) set`);
  } catch (err) {
    toast(describe(err), true);
  }
};

const addLock = (): void => {
  if (!states) return;
  const start = Number(lockStart.value);
  const end = Number(lockEnd.value);
  if (!Number.isInteger(start) || !Number.isInteger(end)) {
    toast("lock needs integer start and end offsets", true);
    return;
  }
  const reason = lockReason.value.trim();
  void setLocks([
    ...states.present.locks,
    { start, end, reason: reason || null },
  ]);
};

const REPORT_KEYS: (keyof RunReportRow)[] = [
  "Method", "Model", "#Shot", "Support", "MAE", "Match", "Direction",
  "SemanticSim", "NormEditDist",
];

const formatNum = (v: number): string =>
  Number.isInteger(v) ? String(v) : v.toFixed(3);

const showReport = async (runId: string): Promise<void> => {
  try {
    const rows = await client.runReport(runId);
    reportTitle.textContent = `Run report · ${runId}`;
    reportTable.replaceChildren();
    const head = reportTable.createTHead().insertRow();
    for (const key of REPORT_KEYS) {
      const th = document.createElement("th");
      th.textContent = String(key);
      head.append(th);
    }
    const body = reportTable.createTBody();
    for (const row of rows) {
      const tr = body.insertRow();
      for (const key of REPORT_KEYS) {
        const value = row[key];
        tr.insertCell().textContent =
          value === null ? "–"
          : typeof value === "number" ? formatNum(value)
          : String(value);
      }
    }
    reportPanel.classList.remove("hidden");
  } catch (err) {
    toast(describe(err), true);
  }
};

const doGenerate = async (): Promise<void> => {
  const pairId = pairInput.value.trim();
  const provider = genProvider.value.trim();
  if (!pairId || !provider) {
    toast("need a pair id and a provider name", true);
    return;
  }
  generateBtn.disabled = true;
  try {
    const result = await client.generate({
      pair_id: pairId,
      providers: [provider],
      method: genMethod.value,
      k: Math.max(1, Number(genK.value) || 1),
    });
    toast(`${result.new_candidates} new candidate(s), run ${result.run_id}`);
    await refreshBank();
    await showReport(result.run_id);
  } catch (err) {
    toast(describe(err), true);
  } finally {
    generateBtn.disabled = false;
  }
};

const openSession = async (): Promise<void> => {
  const pairId = pairInput.value.trim();
  if (!pairId) {
    toast("enter a pair id", true);
    return;
  }
  try {
    const view = await client.createSession(pairId);
    sessionId = view.session_id;
    states = null;
    closeMergePanel();
    adoptView(view);
    gaugeEl.classList.remove("hidden");
    await refreshBank();
  } catch (err) {
    toast(describe(err), true);
  }
};

editor.addEventListener("input", () => {
  if (!states) return;
  if (editBase === null) editBase = states.present;
  states = { ...states, present: withText(states.present, editor.value) };
  renderSentences();
  gauge.textChanged(editor.value);
});
editor.addEventListener("change", () => {
  if (!states || editBase === null) return;
  const edited = states.present;
  states = pushState({ ...states, present: editBase }, edited);
  editBase = null;
});

openBtn.addEventListener("click", () => void openSession());
pairInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") void openSession();
});
refreshBtn.addEventListener("click", () => void refreshBank());
for (const input of [filterProvider, filterMethod, filterMin, filterMax]) {
  input.addEventListener("change", () => void refreshBank());
}
generateBtn.addEventListener("click", () => void doGenerate());
applyEditBtn.addEventListener("click", () => void applyEdit());
undoLocalBtn.addEventListener("click", undoLocal);
revertMergeBtn.addEventListener("click", () => void revertMerge());
addLockBtn.addEventListener("click", addLock);
clearLocksBtn.addEventListener("click", () => void setLocks([]));
commitBtn.addEventListener("click", () => void doCommit());
closeMergeBtn.addEventListener("click", closeMergePanel);
