// Mirror of the server's sentence segmentation, used only to cut the working
// text into drop slots. It computes no displayed numbers; the contract tests
// check it against sentence/token counts recorded from the live service.

import { ABBREVIATIONS } from "./abbreviations.js";

const TERMINALS = new Set([".", "!", "?"]);
const TOKEN_CHAR = /[\p{L}\p{N}']/u;
const TOKEN_RUN = /(?:[\p{L}\p{N}]|')+/gu;

const isSpace = (ch: string): boolean => /\s/u.test(ch);

const isUpper = (ch: string): boolean =>
  ch !== ch.toLowerCase() && ch === ch.toUpperCase();

const wordBefore = (text: string, pos: number): string => {
  let i = pos;
  while (i > 0 && TOKEN_CHAR.test(text[i - 1])) i -= 1;
  return text.slice(i, pos);
};

const stripApostrophes = (word: string): string => word.replace(/^'+|'+$/g, "");

export const segmentSpans = (text: string): Array<[number, number]> => {
  const spans: Array<[number, number]> = [];
  const n = text.length;

  const skipSpace = (pos: number): number => {
    while (pos < n && isSpace(text[pos])) pos += 1;
    return pos;
  };

  let segStart = skipSpace(0);
  let i = segStart;
  while (i < n) {
    if (!TERMINALS.has(text[i])) {
      i += 1;
      continue;
    }
    const runStart = i;
    while (i < n && TERMINALS.has(text[i])) i += 1;
    let boundary: boolean;
    if (i >= n) {
      boundary = true;
    } else {
      const after = skipSpace(i);
      boundary = after > i && after < n && isUpper(text[after]);
    }
    const run = text.slice(runStart, i);
    if (boundary && run.length > 0 && [...run].every((ch) => ch === ".")) {
      const word = stripApostrophes(wordBefore(text, runStart).toLowerCase());
      if (ABBREVIATIONS.has(word)) boundary = false;
    }
    if (boundary) {
      spans.push([segStart, i]);
      segStart = skipSpace(i);
      i = segStart;
    }
  }
  if (segStart < n) {
    let end = n;
    while (end > segStart && isSpace(text[end - 1])) end -= 1;
    if (end > segStart) spans.push([segStart, end]);
  }
  return spans;
};

export const sentences = (text: string): string[] =>
  segmentSpans(text).map(([start, end]) => text.slice(start, end));

export const tokenizeWords = (text: string): string[] => {
  const out: string[] = [];
  for (const match of text.matchAll(TOKEN_RUN)) {
    const trimmed = stripApostrophes(match[0]);
    if (trimmed) out.push(trimmed.toLowerCase());
  }
  return out;
};
