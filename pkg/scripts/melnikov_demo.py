#!/usr/bin/env python3
"""End-to-end demo: build a parameter file, tabulate two Melnikov orders with
the simulation oracle column, and emit plot data.

Usage: python scripts/melnikov_demo.py [--out OUTDIR]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from melnlab.cli import main as cli_main
from melnlab.closedforms import v_zero_coefficients
from melnlab.config import OrderCoefficients, SystemConfig, dump_config

import numpy as np


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out/demo")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    # order-1 block with vanishing reduced part, so M1 = 0 and M2 leads
    rng = np.random.default_rng(42)
    cfg = SystemConfig(n=3, k=2, orders=(
        v_zero_coefficients(3, rng),
        OrderCoefficients(a=(0.2, -0.1, 0.3), beta=(0.4, 0.0, -0.2)),
    ))
    cfg_path = out / "demo_config.json"
    dump_config(cfg, cfg_path)
    print(f"wrote {cfg_path}")

    return cli_main(["melnikov", "--config", str(cfg_path), "--orders", "1,2",
                     "--interval", "0.5:2", "--grid", "12log",
                     "--out", str(out), "--seed", "42"])


if __name__ == "__main__":
    sys.exit(main())
