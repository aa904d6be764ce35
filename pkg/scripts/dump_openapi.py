"""Writes docs/openapi.json from the live FastAPI app.

Run from the repository root after changing any endpoint:

    python3 scripts/dump_openapi.py
"""

import json
import tempfile
from pathlib import Path

from leveltext.assets import default_freq, default_model
from leveltext.harness import ResponseBank
from leveltext.service import ServiceState, create_app

OUT = Path(__file__).resolve().parent.parent / "docs" / "openapi.json"


def main():
    with tempfile.TemporaryDirectory() as scratch:
        state = ServiceState(
            model=default_model(),
            freq=default_freq(),
            pairs={},
            train_pairs=[],
            bank=ResponseBank(Path(scratch) / "bank"),
            workspace=Path(scratch),
            providers={},
        )
        schema = create_app(state).openapi()
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(schema['paths'])} paths)")


if __name__ == "__main__":
    main()
