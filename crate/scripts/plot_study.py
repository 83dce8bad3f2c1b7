#!/usr/bin/env python3
"""Plot gclab CSV output.

The Rust binary only emits data; figures are this script's job so the
workspace carries no plotting dependencies. Two inputs are understood,
detected from the header line:

  n,p,seed,alpha_star,t,exceeded      `gclab study ... --format csv`
  N,P,t,bound,mass_within_bound      `gclab count --grid`

Usage:
  gclab study --n 64 --p 0.5 --samples 200 --format csv > study.csv
  ./scripts/plot_study.py study.csv -o study.png

  gclab count --domain 100 --precision 70 --grid > grid.csv
  ./scripts/plot_study.py grid.csv -o grid.png

Requires matplotlib (pip install matplotlib). Nothing else.
"""

import argparse
import csv
import math
import sys


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames, list(reader)


def plot_study(rows, ax):
    n = int(rows[0]["n"])
    norm = n * math.log(n)
    ratios = sorted(int(r["alpha_star"]) / norm for r in rows)
    threshold = float(rows[0]["t"]) / norm
    ax.hist(ratios, bins=min(40, max(5, len(ratios) // 5)), color="#4878a8")
    ax.axvline(threshold, color="#a84848", linestyle="--",
               label=f"threshold t = {threshold:.2f} n ln n")
    ax.set_xlabel(r"$\alpha^*(G) / (n \ln n)$")
    ax.set_ylabel("samples")
    ax.set_title(f"marked-degree optimum, n = {n}, p = {rows[0]['p']}, "
                 f"{len(ratios)} samples")
    ax.legend()


def plot_grid(rows, ax):
    t = [int(r["t"]) for r in rows]
    mass = [float(r["mass_within_bound"]) for r in rows]
    floor = 8 / math.pi ** 2
    ax.plot(t, mass, marker=".", color="#4878a8", label="mass within bound")
    ax.axhline(floor, color="#a84848", linestyle="--",
               label=r"$8/\pi^2 \approx 0.811$")
    ax.set_ylim(min(0.5, min(mass) - 0.05), 1.02)
    ax.set_xlabel("true count t")
    ax.set_ylabel("probability")
    ax.set_title(f"counting success mass, N = {rows[0]['N']}, P = {rows[0]['P']}")
    ax.legend()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_path", help="study or grid CSV emitted by gclab")
    parser.add_argument("-o", "--out", help="write the figure here instead of showing it")
    args = parser.parse_args()

    header, rows = read_rows(args.csv_path)
    if not rows:
        sys.exit("no data rows in " + args.csv_path)

    import matplotlib
    if args.out:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    if header[0] == "n":
        plot_study(rows, ax)
    elif header[0] == "N":
        plot_grid(rows, ax)
    else:
        sys.exit(f"unrecognized header {header!r}")
    fig.tight_layout()

    if args.out:
        fig.savefig(args.out, dpi=150)
        print("wrote", args.out)
    else:
        plt.show()


if __name__ == "__main__":
    main()
