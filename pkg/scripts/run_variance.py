#!/usr/bin/env python3
"""Contrast the alpha-blocks and classic extremal-index estimators' variances
on linear models, where the alpha-blocks limit is degenerate.

Usage: python scripts/run_variance.py [--reps 500] [--outdir results/variance]
"""

import argparse
import json
import sys
from pathlib import Path

from lpblocks.cli import main as cli

MODELS = {
    "ar05": {"kind": "ar1", "phi": 0.5, "alpha": 1.0},
    "ma": {"kind": "linear-ma", "coeffs": [1.0, 0.5], "alpha": 1.0},
}


def run(argv):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=500)
    parser.add_argument("--n", type=int, default=12000)
    parser.add_argument("--k", type=int, default=8)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--outdir", default="results/variance")
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, spec in MODELS.items():
        model = outdir / f"{name}.json"
        model.write_text(json.dumps(spec))
        assert cli(["variance-compare", "--model", str(model), "--k", str(args.k),
                    "--n", str(args.n), "--reps", str(args.reps), "--seed", str(args.seed),
                    "--format", "json", "--out", str(outdir / f"{name}_variance.json")]) == 0
    print(f"done: {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
