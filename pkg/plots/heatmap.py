#!/usr/bin/env python3
"""Filled heatmap with contour curves over the (k, k') tuning grid.

Usage: plots/heatmap.py <grid.csv> --metric sd|mse <out.png>

Cells the harness skipped (empty fields in the CSV) are rendered in a
distinct hatch color.  Axes are log-scaled.  The plotted matrix is echoed to
a JSON sidecar, which is the bit-stable artifact.
"""

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from common import SchemaError, read_csv, write_sidecar


def build_grid_data(grid_csv, metric):
    _, rows = read_csv(grid_csv, "heatmap")
    k_values = sorted({int(r["k"]) for r in rows})
    kp_values = sorted({int(r["k_prime"]) for r in rows})
    seen = {(int(r["k"]), int(r["k_prime"])) for r in rows}
    missing = [(k, kp) for k in k_values for kp in kp_values if (k, kp) not in seen]
    if missing:
        raise SchemaError(f"{grid_csv}: ragged grid, missing cells {missing}")

    matrix = np.full((len(k_values), len(kp_values)), np.nan)
    for r in rows:
        value = r[metric]
        if value != "":
            i = k_values.index(int(r["k"]))
            l = kp_values.index(int(r["k_prime"]))
            matrix[i, l] = float(value)
    return {
        "schema": "lpblocks.v1",
        "kind": "heatmap-sidecar",
        "metric": metric,
        "k_values": k_values,
        "kprime_values": kp_values,
        "matrix": [[None if math.isnan(v) else v for v in row] for row in matrix],
    }


def _log_edges(values):
    values = np.asarray(values, dtype=float)
    if len(values) == 1:
        return np.array([values[0] / math.sqrt(2.0), values[0] * math.sqrt(2.0)])
    mids = np.sqrt(values[:-1] * values[1:])
    lo = values[0] ** 2 / mids[0]
    hi = values[-1] ** 2 / mids[-1]
    return np.concatenate([[lo], mids, [hi]])


def render(data, out_path):
    matrix = np.array([[np.nan if v is None else v for v in row] for row in data["matrix"]])
    k_values = np.array(data["k_values"], dtype=float)
    kp_values = np.array(data["kprime_values"], dtype=float)
    masked = np.ma.masked_invalid(matrix)

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("lightgray")
    mesh = ax.pcolormesh(_log_edges(kp_values), _log_edges(k_values), masked, cmap=cmap)
    fig.colorbar(mesh, ax=ax, label=data["metric"])

    if matrix.shape[0] >= 2 and matrix.shape[1] >= 2 and np.isfinite(matrix).sum() >= 4:
        kp_grid, k_grid = np.meshgrid(kp_values, k_values)
        try:
            cs = ax.contour(kp_grid, k_grid, masked, colors="white", linewidths=0.8)
            ax.clabel(cs, fontsize=7)
        except (ValueError, TypeError):
            pass  # contouring can fail on heavily masked grids; heatmap still informative
    if matrix.size == 1:
        ax.annotate(f"{data['metric']} = {matrix[0, 0]:.4g}" if np.isfinite(matrix[0, 0])
                    else "skipped", xy=(0.5, 0.5), xycoords="axes fraction",
                    ha="center", color="white", fontsize=12)

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("k' (tail-index order statistics)")
    ax.set_ylabel("k (extremal blocks)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("grid_csv")
    parser.add_argument("out_png")
    parser.add_argument("--metric", choices=("sd", "mse"), default="mse")
    args = parser.parse_args(argv)
    try:
        data = build_grid_data(args.grid_csv, args.metric)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    render(data, args.out_png)
    sidecar = write_sidecar(args.out_png, data)
    print(f"wrote {args.out_png} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
