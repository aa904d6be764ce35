// Fixture replay for contract tests. Fixtures were recorded from the live
// service by scripts/record_ui_fixtures.py; the stub matches on method plus
// decoded path and query params, because the client URL-encodes ':' and '>'
// while the recorder wrote them literally.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

export type Fixture = {
  request: { method: string; path: string; body?: unknown };
  response: { status: number; body: unknown };
};

const FIXTURE_DIR = fileURLToPath(new URL("./fixtures/", import.meta.url));

export const fixture = (name: string): Fixture =>
  JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf8")) as Fixture;

export const fixtureBody = <T>(name: string): T =>
  fixture(name).response.body as T;

export const meta = (): {
  pair_id: string;
  source_text: string;
  source_score: number;
  target_text: string;
  target_score: number;
  merge_candidate: string;
  locked_candidate: string;
  lock_span: { start: number; end: number; reason: string };
  staged_link_ids: number[];
  run_id: string;
} => JSON.parse(readFileSync(join(FIXTURE_DIR, "meta.json"), "utf8"));

export const segmentationCases = (): Array<{
  text: string;
  sentence_count: number;
  token_count: number;
}> => JSON.parse(readFileSync(join(FIXTURE_DIR, "segmentation_cases.json"), "utf8"));

type ParsedPath = { pathname: string; params: Map<string, string> };

const parsePath = (path: string): ParsedPath => {
  const [pathname, search = ""] = path.split("?", 2);
  const params = new Map<string, string>();
  if (search) {
    for (const part of search.split("&")) {
      const [key, value = ""] = part.split("=", 2);
      params.set(decodeURIComponent(key), decodeURIComponent(value));
    }
  }
  return { pathname, params };
};

const sameRequest = (recorded: string, requested: string): boolean => {
  const a = parsePath(recorded);
  const b = parsePath(requested);
  if (a.pathname !== b.pathname || a.params.size !== b.params.size) return false;
  for (const [key, value] of a.params) {
    if (b.params.get(key) !== value) return false;
  }
  return true;
};

// Scatter bodies were recorded as raw CSV strings; everything else is JSON.
export const fetchFromFixtures = (fixtures: readonly Fixture[]): FetchLike =>
  async (input, init) => {
    const method = init?.method ?? "GET";
    const match = fixtures.find(
      (f) => f.request.method === method && sameRequest(f.request.path, input),
    );
    if (!match) throw new Error(`no fixture for ${method} ${input}`);
    const body = match.response.body;
    const isText = typeof body === "string";
    return new Response(isText ? body : JSON.stringify(body), {
      status: match.response.status,
      headers: { "content-type": isText ? "text/csv" : "application/json" },
    });
  };

export const sessionIdOf = (f: Fixture): string => {
  const parts = f.request.path.split("/");
  return parts[2];
};
