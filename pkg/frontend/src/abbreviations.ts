// Generated by scripts/record_ui_fixtures.py from the service's packaged
// abbreviation list. Regenerate rather than edit.
export const ABBREVIATIONS: ReadonlySet<string> = new Set([
  "a",
  "al",
  "approx",
  "apr",
  "assoc",
  "aug",
  "ave",
  "b",
  "blvd",
  "c",
  "ca",
  "capt",
  "cf",
  "ch",
  "chap",
  "col",
  "d",
  "dec",
  "dept",
  "dr",
  "e",
  "ed",
  "eds",
  "eq",
  "eqs",
  "est",
  "etc",
  "f",
  "feb",
  "fig",
  "figs",
  "fri",
  "g",
  "gen",
  "h",
  "hon",
  "i",
  "inst",
  "j",
  "jan",
  "jr",
  "jul",
  "jun",
  "k",
  "l",
  "lt",
  "m",
  "mon",
  "mr",
  "mrs",
  "ms",
  "mt",
  "n",
  "nov",
  "o",
  "oct",
  "p",
  "pp",
  "prof",
  "q",
  "r",
  "rd",
  "rep",
  "rev",
  "s",
  "sec",
  "secs",
  "sen",
  "sep",
  "sept",
  "sgt",
  "sr",
  "st",
  "t",
  "thu",
  "thurs",
  "tue",
  "tues",
  "u",
  "univ",
  "v",
  "viz",
  "vol",
  "vols",
  "vs",
  "w",
  "x",
  "y",
  "z"
]);
