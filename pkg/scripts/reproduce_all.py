#!/usr/bin/env python3
"""Run every scripted reproduction case and summarize PASS/FAIL.

Usage: python scripts/reproduce_all.py [--out OUTDIR] [--seed N]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from melnlab.cli import CASES, main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/reproductions")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    failures = []
    for case in CASES:
        t0 = time.time()
        code = cli_main(["reproduce", "--case", case,
                         "--out", str(Path(args.out) / case),
                         "--seed", str(args.seed)])
        print(f"    ({time.time() - t0:.1f}s, exit {code})")
        if code != 0:
            failures.append(case)
    print("\n" + ("all cases PASS" if not failures else f"FAILED: {failures}"))
    return 0 if not failures else 2


if __name__ == "__main__":
    sys.exit(main())
