#!/usr/bin/env python3
"""Plot result tables produced by the cyclodet CLI.

Reads the CSV emitted by `cyclodet mc|roc|fuse|shadow` and draws one curve
per (detector_kind, num_users) pair, with Wilson confidence bands. The x axis
is picked automatically: snr_db when it varies, otherwise far.

Usage:
    cyclodet mc --out pd_vs_snr.csv
    scripts/plot_results.py pd_vs_snr.csv -o pd_vs_snr.png
"""

import argparse
import csv
import sys
from collections import defaultdict


def load(path):
    with open(path, newline="") as f:
        return [row for row in csv.DictReader(f)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="result table from the cyclodet CLI")
    ap.add_argument("-o", "--out", help="output image (default: show window)")
    ap.add_argument(
        "--rate",
        choices=["pd", "far"],
        default="pd",
        help="which empirical rate to plot (default: pd)",
    )
    args = ap.parse_args()

    rows = load(args.csv)
    if not rows:
        sys.exit("no rows in table")

    snrs = {r["snr_db"] for r in rows if r["snr_db"]}
    x_field = "snr_db" if len(snrs) > 1 else "far"
    y_field = "empirical_pd" if args.rate == "pd" else "empirical_far"

    curves = defaultdict(list)
    for r in rows:
        if not r[x_field] or not r[y_field]:
            continue
        key = (r["detector_kind"], r["num_users"])
        curves[key].append(
            (
                float(r[x_field]),
                float(r[y_field]),
                float(r["wilson_ci_low"]),
                float(r["wilson_ci_high"]),
            )
        )

    import matplotlib

    if args.out:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (kind, users), points in sorted(curves.items()):
        points.sort()
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        label = f"{kind} (K={users})"
        (line,) = ax.plot(xs, ys, marker="o", markersize=3, label=label)
        if args.rate == "pd":
            ax.fill_between(
                xs,
                [p[2] for p in points],
                [p[3] for p in points],
                alpha=0.15,
                color=line.get_color(),
            )

    ax.set_xlabel("SNR (dB)" if x_field == "snr_db" else "false alarm rate")
    ax.set_ylabel(
        "detection probability" if args.rate == "pd" else "empirical false alarm rate"
    )
    if x_field == "far":
        ax.set_xscale("log")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()

    if args.out:
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")
    else:
        plt.show()


if __name__ == "__main__":
    main()
