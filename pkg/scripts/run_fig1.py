#!/usr/bin/env python3
"""Reproduce the four-panel histogram study on the benchmark Kesten model.

Runs the Monte Carlo study (n = 12000, 1000 replicates, k = 8, b = 38,
alpha = 1 known) for the extremal index and the first three cluster-size
probabilities, then renders each histogram with its Gaussian overlays.

Usage: python scripts/run_fig1.py [--reps 1000] [--outdir results/fig1]
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from lpblocks.cli import main as cli

ROOT = Path(__file__).resolve().parent.parent


def run(argv):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--n", type=int, default=12000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--outdir", default="results/fig1")
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    model = outdir / "kesten.json"
    model.write_text(json.dumps({"kind": "kesten", "log_a_mu": -0.5, "log_a_sigma": 1.0}))

    common = ["--model", str(model), "--k", "8", "--b", "38", "--alpha", "1",
              "--n", str(args.n), "--reps", str(args.reps), "--seed", str(args.seed),
              "--threads", str(args.threads)]

    theta_csv = outdir / "theta.csv"
    assert cli(["mc", *common, "--functional", "extremal-index", "--out", str(theta_csv)]) == 0
    pi_csv = outdir / "pi.csv"
    assert cli(["mc", *common, "--functional", "cluster-size", "--j", "1", "2", "3",
                "--out", str(pi_csv)]) == 0

    panels = [(theta_csv, "theta")] + [(outdir / f"pi_j{j}.csv", f"pi{j}") for j in (1, 2, 3)]
    for csv_path, name in panels:
        subprocess.run([sys.executable, str(ROOT / "plots" / "fig1.py"), str(csv_path),
                        str(csv_path) + ".summary.json", str(outdir / f"{name}.png")],
                       check=True)
    print(f"done: {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
