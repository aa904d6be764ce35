// Mirrors of the service's JSON shapes. Field names match the wire format
// exactly so responses pass through without translation.

export type ReadabilityReport = {
  score: number;
  msl: number;
  mlwf: number;
  token_count: number;
  sentence_count: number;
};

export type LockSpan = {
  start: number;
  end: number;
  reason?: string | null;
};

export type SessionView = {
  session_id: string;
  pair_id: string;
  working_text: string;
  report: ReadabilityReport | null;
  unscorable: boolean;
  locks: LockSpan[];
  undo_depth: number;
  source_score: number;
  target_score: number;
};

export type LinkLabel = "unchanged" | "modified" | "inserted" | "deleted";

export type AlignmentLink = {
  link_id: number;
  source: number[];
  candidate: number[];
  label: LinkLabel;
  edit_distance: number;
};

export type AlignmentMap = {
  links: AlignmentLink[];
  similarity_matrix_digest: string;
};

export type PairEvaluation = {
  pair_id: string;
  status: string;
  source_score: number | null;
  intended_score: number | null;
  resulting_score: number | null;
  abs_error: number | null;
  match: boolean | null;
  direction_ok: boolean | null;
  bert_like: number[] | null;
  semantic_similarity: number | null;
  normalized_edit_distance: number | null;
  failure_status: string | null;
};

export type BankCandidate = {
  candidate_id: string;
  pair_id: string;
  provider: string;
  method: string;
  shot_ids: string[];
  output_text: string;
  report: ReadabilityReport;
  evaluation: PairEvaluation;
  created_at: string;
};

export type GenerateResult = {
  run_id: string;
  new_candidates: number;
  pair_id: string;
};

export type RunReportRow = {
  Method: string;
  Model: string;
  "#Shot": number;
  Support: number;
  MAE: number | null;
  Match: number | null;
  Direction: number | null;
  P: number | null;
  R: number | null;
  F1: number | null;
  SemanticSim: number | null;
  NormEditDist: number | null;
  Degraded: boolean;
};

export type Replacement = {
  link_id: number;
  side?: "base" | "candidate";
};

export type ApiErrorBody = {
  code: string;
  message?: string;
  link_ids?: number[];
};
