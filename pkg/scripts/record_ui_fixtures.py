"""Records the workbench-ui contract fixtures from the live HTTP service.

Drives the real app in-process and dumps request/response pairs under
frontend/tests/fixtures/, plus the generated abbreviation module the UI's
sentence-segmentation mirror imports.  Regenerate after changing the service:

    python3 scripts/record_ui_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from leveltext import assets
from leveltext.corpus import permute_pairs
from leveltext.harness import ResponseBank
from leveltext.providers import build_provider
from leveltext.service import ServiceState, create_app
from leveltext.textproc import ABBREVIATIONS, tokenize

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = ROOT / "frontend" / "tests" / "fixtures"
ABBREV_TS = ROOT / "frontend" / "src" / "abbreviations.ts"

PAIR_ID = "1:3>1"
CANNED_TEXT = (
    "Rain comes down from heavy clouds and spreads over the ground. "
    "The water moves into small streams. Later the sun dries the land."
)
SEGMENTATION_TEXTS = [
    "Dr. Smith arrived. He sat down.",
    "The U.S. Army camped by the river.",
    "What?! Next we left.",
    "He said no. then we kept walking.",
]


def record(client, name, method, path, body=None, status=200):
    if method == "GET":
        response = client.get(path)
    else:
        response = client.post(path, json=body)
    assert response.status_code == status, (name, response.status_code, response.text[:300])
    recorded = response.text if "scatter" in path else response.json()
    payload = {
        "request": {"method": method, "path": path},
        "response": {"status": response.status_code, "body": recorded},
    }
    if body is not None:
        payload["request"]["body"] = body
    (FIXTURE_DIR / f"{name}.json").write_text(
        json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return recorded


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    for stale in FIXTURE_DIR.glob("*.json"):
        stale.unlink()

    pool = permute_pairs(assets.seed_corpus())
    pair = next(p for p in pool if p.pair_id == PAIR_ID)
    scratch = Path(tempfile.mkdtemp(prefix="ui-fixtures-"))
    state = ServiceState(
        model=assets.default_model(),
        freq=assets.default_freq(),
        pairs={p.pair_id: p for p in pool},
        train_pairs=pool,
        bank=ResponseBank(scratch / "bank"),
        workspace=scratch,
        providers={
            "oracle": build_provider({"type": "mock", "mode": "oracle", "name": "oracle"}, pairs=pool),
            "canned": build_provider(
                {"type": "mock", "mode": "canned", "name": "canned", "text": CANNED_TEXT}, pairs=pool
            ),
        },
    )
    client = TestClient(create_app(state))

    sentences = tokenize(pair.source_text)
    raw = [sentences.sentence_raw(i) for i in range(sentences.sentence_count)]
    # The closing sentence is long and token-disjoint from its neighbor so the
    # aligner prefers a standalone insertion over a join.
    merge_candidate = " ".join(
        [
            raw[0],
            "The gathered water runs into small streams that feed larger waterways.",
            raw[2],
            "A wholly new closing idea arrives here at this very point, "
            "surprising every reader with its bold, unexpected finish.",
        ]
    )
    locked_candidate = " ".join(
        ["Rain descends from soaked clouds and gathers across the terrain.", raw[1], raw[2]]
    )

    record(client, "score_working", "POST", "/score", {"text": pair.source_text})
    record(client, "score_target", "POST", "/score", {"text": pair.target_text})
    record(client, "score_unscorable", "POST", "/score", {"text": "   "}, status=400)

    view = record(client, "session_create", "POST", "/sessions", {"pair_id": PAIR_ID})
    session_id = view["session_id"]

    generate = record(
        client, "generate_oracle", "POST", "/generate", {"pair_id": PAIR_ID, "providers": ["oracle"]}
    )
    record(
        client, "generate_canned", "POST", "/generate", {"pair_id": PAIR_ID, "providers": ["canned"]}
    )
    bank = record(client, "bank_query", "GET", f"/bank?pair_id={PAIR_ID}")
    assert len(bank["candidates"]) == 2
    record(client, "bank_empty", "GET", "/bank?pair_id=1:1>2")
    # A score window around the oracle candidate only; the canned one falls outside.
    filtered = record(
        client, "bank_filtered", "GET", f"/bank?pair_id={PAIR_ID}&min_score=450&max_score=470"
    )
    assert len(filtered["candidates"]) == 1, [c["provider"] for c in filtered["candidates"]]
    assert filtered["candidates"][0]["provider"] == "oracle"

    align_merge = record(
        client, "align_merge", "POST", "/align",
        {"base": pair.source_text, "candidate": merge_candidate},
    )
    labels = [link["label"] for link in align_merge["links"]]
    assert labels == ["unchanged", "modified", "unchanged", "inserted"], labels
    staged = [l["link_id"] for l in align_merge["links"] if l["label"] in ("modified", "inserted")]

    merged_view = record(
        client, "merge_ok", "POST", f"/sessions/{session_id}/merge",
        {
            "candidate": merge_candidate,
            "replacements": [{"link_id": link_id} for link_id in staged],
            "alignment_digest": align_merge["similarity_matrix_digest"],
        },
    )
    assert merged_view["working_text"] != pair.source_text
    record(client, "undo", "POST", f"/sessions/{session_id}/undo")

    # Second session: a lock over the opening sentence rejects a merge there.
    locked_view = record(client, "session_locked", "POST", "/sessions", {"pair_id": PAIR_ID})
    lock_span = {"start": 0, "end": len(raw[0]), "reason": "keep opening"}
    record(
        client, "locks_set", "POST",
        f"/sessions/{locked_view['session_id']}/locks", {"spans": [lock_span]},
    )
    align_locked = record(
        client, "align_locked", "POST", "/align",
        {"base": pair.source_text, "candidate": locked_candidate},
    )
    blocked = [l["link_id"] for l in align_locked["links"] if l["label"] == "modified"]
    record(
        client, "merge_locked", "POST",
        f"/sessions/{locked_view['session_id']}/merge",
        {"candidate": locked_candidate, "replacements": [{"link_id": blocked[0]}]},
        status=409,
    )

    run_id = generate["run_id"]
    record(client, "run_report", "GET", f"/runs/{run_id}/report")
    record(client, "scatter", "GET", f"/runs/{run_id}/scatter")

    cases = []
    for text in SEGMENTATION_TEXTS:
        body = record(
            client, f"segmentation_{len(cases)}", "POST", "/score", {"text": text}
        )
        cases.append({"text": text, "sentence_count": body["sentence_count"],
                      "token_count": body["token_count"]})
    (FIXTURE_DIR / "segmentation_cases.json").write_text(
        json.dumps(cases, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    meta = {
        "pair_id": PAIR_ID,
        "source_text": pair.source_text,
        "source_score": pair.source_score,
        "target_text": pair.target_text,
        "target_score": pair.target_score,
        "merge_candidate": merge_candidate,
        "locked_candidate": locked_candidate,
        "lock_span": lock_span,
        "staged_link_ids": staged,
        "run_id": run_id,
    }
    (FIXTURE_DIR / "meta.json").write_text(
        json.dumps(meta, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8"
    )

    ABBREV_TS.parent.mkdir(parents=True, exist_ok=True)
    words = ",\n".join(f"  {json.dumps(word)}" for word in sorted(ABBREVIATIONS))
    ABBREV_TS.write_text(
        "// Generated by scripts/record_ui_fixtures.py from the service's packaged\n"
        "// abbreviation list. Regenerate rather than edit.\n"
        "export const ABBREVIATIONS: ReadonlySet<string> = new Set([\n"
        f"{words}\n"
        "]);\n",
        encoding="utf-8",
    )
    print(f"wrote {len(list(FIXTURE_DIR.glob('*.json')))} fixtures and {ABBREV_TS.name}")


if __name__ == "__main__":
    main()
