#!/usr/bin/env python3
"""End-to-end reproduction: build the QF-95 corpus, sweep capacities,
and print the adaptive-vs-fixed comparison table.

Equivalent to:  make_corpus.py <dir> && qimstego experiment <dir> <csv>
"""

import argparse
import tempfile
from pathlib import Path

from make_corpus import cover_arrays  # resolved via the script's own directory
from PIL import Image

from qimstego.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweep_results.csv", help="CSV output path")
    ap.add_argument("--capacities", default="10000,25000,50000")
    ap.add_argument("--fixed-q", type=int, default=8)
    ap.add_argument("--seed", type=int, default=20210)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory(prefix="covers_") as tmp:
        for name, arr in cover_arrays().items():
            Image.fromarray(arr).save(Path(tmp) / f"{name}.jpg", "JPEG", quality=95)
        rc = cli_main(
            [
                "experiment", tmp, args.out,
                "--capacities", args.capacities,
                "--fixed-q", str(args.fixed_q),
                "--seed", str(args.seed),
            ]
        )
    if rc == 0:
        print()
        print(Path(args.out).read_text(), end="")
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
