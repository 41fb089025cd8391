#!/usr/bin/env python3
"""Run the two-hop demo corpus in serve mode so the review UI has live queries.

Every candidate is queried (query fraction 1.0) to keep the inbox busy.
Answer at http://127.0.0.1:8750/ui while the engine blocks; outputs land in
the --out directory when the run completes.
"""

import argparse
import json
import tempfile
from pathlib import Path

from secrel.cli import main as cli_main

FIXTURE = Path(__file__).parent.parent / "tests" / "data" / "two_hop"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bind", default="127.0.0.1:8750")
    parser.add_argument("--out", default=None)
    parser.add_argument("--ui-dir", default="frontend/dist")
    args = parser.parse_args()
    out = args.out or tempfile.mkdtemp(prefix="secrel-demo-")

    config = Path(tempfile.mkdtemp()) / "config.json"
    config.write_text(json.dumps({"query_fraction": 1.0}), "utf-8")

    raise SystemExit(
        cli_main(
            [
                "bootstrap",
                "--corpus", str(FIXTURE / "corpus"),
                "--seeds", str(FIXTURE / "seeds"),
                "--gazetteers", str(FIXTURE / "gazetteers"),
                "--config", str(config),
                "--oracle", "serve",
                "--bind", args.bind,
                "--ui-dir", args.ui_dir,
                "--out", out,
            ]
        )
    )


if __name__ == "__main__":
    main()
