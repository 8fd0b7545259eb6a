#!/usr/bin/env python3
"""Plot hjbkit report CSVs (convergence, scaling) as PNG files.

Usage:
  plot_csv.py convergence path/to/convergence_summary.csv [out.png]
  plot_csv.py scaling path/to/scaling.csv [out.png]
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def plot_convergence(path, out):
    rows = read_rows(path)
    ns = [int(r["N"]) for r in rows]
    err = [float(r["mean_l2_rel"]) for r in rows]
    se = [float(r["se_l2_rel"]) for r in rows]
    plt.figure(figsize=(5, 4))
    plt.errorbar(ns, err, yerr=[3 * s for s in se], marker="o")
    plt.xlabel("N (levels, M per config)")
    plt.ylabel("relative L2 error over Q")
    plt.yscale("log")
    plt.grid(True, which="both", alpha=0.3)
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    print(f"wrote {out}")


def plot_scaling(path, out):
    rows = read_rows(path)
    ds = [int(r["d"]) for r in rows]
    sizes = [int(r["size_frozen"]) for r in rows]
    plt.figure(figsize=(5, 4))
    plt.loglog(ds, sizes, marker="o")
    plt.xlabel("state dimension d")
    plt.ylabel("frozen network size (nonzero weights)")
    plt.grid(True, which="both", alpha=0.3)
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    print(f"wrote {out}")


def main():
    if len(sys.argv) < 3:
        print(__doc__)
        return 2
    kind, path = sys.argv[1], sys.argv[2]
    out = sys.argv[3] if len(sys.argv) > 3 else f"{kind}.png"
    if kind == "convergence":
        plot_convergence(path, out)
    elif kind == "scaling":
        plot_scaling(path, out)
    else:
        print(f"unknown plot kind: {kind}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
