#!/usr/bin/env python3
"""Histogram of Monte Carlo estimates with two Gaussian overlays.

Usage: plots/fig1.py <mc.csv> <summary.json> <out.png>

The dotted curve is the Gaussian fitted from the Monte Carlo study itself
(empirical mean and SD); the solid curve uses the mean plug-in SD rescaled by
1/sqrt(k).  A vertical line marks the oracle value with a band of +- one
Monte Carlo standard error when available.  Alongside the image, a JSON
sidecar records every plotted array; the sidecar is the bit-stable artifact.
"""

import argparse
import math
import sys
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from common import SchemaError, read_csv, read_summary, write_sidecar


def _normal_pdf(x, mu, sd):
    return np.exp(-0.5 * ((x - mu) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))


def build_figure_data(mc_csv, summary_json):
    _, rows = read_csv(mc_csv, "mc")
    if len(rows) < 30:
        raise SchemaError(f"{mc_csv}: need at least 30 replicate rows, got {len(rows)}")
    estimates = np.array([float(r["estimate"]) for r in rows])
    summary = read_summary(summary_json, "mc-summary")

    bins = max(10, min(40, int(round(math.sqrt(len(estimates))))))
    counts, edges = np.histogram(estimates, bins=bins, density=True)

    overlay = summary["gaussian_overlay"]
    sd_emp = overlay["sd_empirical"]
    sd_plug = overlay["sd_plugin"]
    curves = None
    if sd_emp > 0.0 and sd_plug > 0.0:
        center = overlay["empirical_mean"]
        span = 4.0 * max(sd_emp, sd_plug)
        x = np.linspace(min(estimates.min(), center - span),
                        max(estimates.max(), center + span), 256)
        curves = {
            "x": x.tolist(),
            "dotted": _normal_pdf(x, center, sd_emp).tolist(),
            "solid": _normal_pdf(x, center, sd_plug).tolist(),
        }
    else:
        warnings.warn("degenerate estimates (zero spread): overlays suppressed")

    oracle = None
    if summary.get("oracle") is not None:
        oracle = {"value": summary["oracle"], "stderr": summary.get("oracle_mc_stderr")}

    return {
        "schema": "lpblocks.v1",
        "kind": "fig1-sidecar",
        "label": f"{summary['functional']}" + (f"-j{summary['j']}" if summary.get("j") else ""),
        "histogram": {"bin_edges": edges.tolist(), "counts": counts.tolist()},
        "curves": curves,
        "oracle": oracle,
    }


def render(data, out_path):
    fig, ax = plt.subplots(figsize=(5, 4))
    edges = np.array(data["histogram"]["bin_edges"])
    counts = np.array(data["histogram"]["counts"])
    ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge",
           color="#9ecae1", edgecolor="white", label="estimates")
    if data["curves"] is not None:
        x = np.array(data["curves"]["x"])
        ax.plot(x, data["curves"]["dotted"], "k:", label="Gaussian (empirical SD)")
        ax.plot(x, data["curves"]["solid"], "k-", label="Gaussian (plug-in SD)")
    if data["oracle"] is not None:
        value = data["oracle"]["value"]
        stderr = data["oracle"]["stderr"]
        if stderr:
            ax.axvspan(value - stderr, value + stderr, color="red", alpha=0.2)
        ax.axvline(value, color="red", lw=1.5, label="oracle")
    ax.set_xlabel(data["label"])
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("mc_csv")
    parser.add_argument("summary_json")
    parser.add_argument("out_png")
    args = parser.parse_args(argv)
    try:
        data = build_figure_data(args.mc_csv, args.summary_json)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    render(data, args.out_png)
    sidecar = write_sidecar(args.out_png, data)
    print(f"wrote {args.out_png} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
