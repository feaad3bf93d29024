#!/usr/bin/env python3
"""Regenerate the shipped experiment fixtures from the scenario builders."""
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from opseq.scenarios import FIXTURE_NAMES, fixture_document  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "opseq" / "fixtures"


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        text = json.dumps(fixture_document(name), sort_keys=True, indent=2) + "\n"
        path = OUT / f"{name}.json"
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path} ({len(text)} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
