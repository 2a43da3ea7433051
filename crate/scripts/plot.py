#!/usr/bin/env python3
"""Plot companion for ternlut CSV outputs.

The tool emits tidy CSV only; this script turns those files into the standard
figures:

  cost        stacked per-submodule area bars vs group size
              (input: `ternlut cost --n N --m M --mu 1:5 ...`)
  efficiency  area efficiency vs square tile size
              (input: `ternlut efficiency ...`)
  geometry    area decrease vs tile aspect ratio at fixed total size
              (input: `ternlut geometry --size S ...`)
  frontier    area vs throughput scatter with the Pareto frontier
              (input: `ternlut dse ...`)

Usage: plot.py <kind> <input.csv> [-o out.png]
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_cost(df: pd.DataFrame, ax):
    parts = ["build_area", "accumulate_area", "mux_area", "reg_area"]
    labels = ["Build adders", "Accumulate adders", "Read-out muxes", "Output registers"]
    gamma = df["total_area"] / (df[parts].sum(axis=1))
    bottom = None
    for part, label in zip(parts, labels):
        scaled = df[part] * gamma  # show gamma-scaled contributions
        ax.bar(df["mu"], scaled, bottom=bottom, label=label)
        bottom = scaled if bottom is None else bottom + scaled
    ax.plot(df["mu"], df["total_area"], "k.-", label="Total")
    ax.set_xlabel("group size $\\mu$")
    ax.set_ylabel("modeled area (normalized units)")
    ax.set_xticks(df["mu"])
    ax.legend()
    ax.set_title(f"Area breakdown, {int(df['n'][0])}x{int(df['m'][0])} {df['act'][0]}")


def plot_efficiency(df: pd.DataFrame, ax):
    ax.plot(df["size"], df["efficiency"], "o-")
    for _, row in df.iterrows():
        ax.annotate(f"$\\mu$={int(row['mu'])}", (row["size"], row["efficiency"]),
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("square tile size n = m")
    ax.set_ylabel("throughput / area")
    ax.set_title("Area efficiency vs tile size (optimal group size)")


def plot_geometry(df: pd.DataFrame, ax):
    ratio = df["K"] / (df["L"] * df["mu"])
    sc = ax.scatter(ratio, 100.0 * df["delta"], c=df["mu"], cmap="viridis", s=12)
    best = df[df["is_argmin"] == 1].iloc[0]
    ax.scatter([best["K"] / (best["L"] * best["mu"])], [100.0 * best["delta"]],
               marker="*", s=220, color="red",
               label=f"argmin L={int(best['L'])} mu={int(best['mu'])} K={int(best['K'])}")
    ax.axvline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_xscale("log")
    ax.set_xlabel("aspect ratio $K / (L \\cdot \\mu)$  (1 = square)")
    ax.set_ylabel("area decrease vs square optimum [%]")
    ax.legend()
    plt.colorbar(sc, ax=ax, label="$\\mu$")
    ax.set_title("Rectangular-tile geometry scan")


def plot_frontier(df: pd.DataFrame, ax):
    ax.scatter(df["throughput"], df["total_area"], s=10, alpha=0.5, label="design points")
    # Pareto frontier: lowest area per throughput level, scanning downward.
    pts = df.sort_values(["throughput", "total_area"], ascending=[False, True])
    frontier = []
    best = float("inf")
    for _, row in pts.iterrows():
        if row["total_area"] < best:
            best = row["total_area"]
            frontier.append((row["throughput"], row["total_area"]))
    frontier.reverse()
    ax.plot([p[0] for p in frontier], [p[1] for p in frontier], "r.-", label="Pareto frontier")
    ax.set_xlabel("throughput [mul/cycle]")
    ax.set_ylabel("modeled area (normalized units)")
    ax.legend()
    ax.set_title("Design-space sweep")


KINDS = {
    "cost": plot_cost,
    "efficiency": plot_efficiency,
    "geometry": plot_geometry,
    "frontier": plot_frontier,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=sorted(KINDS))
    ap.add_argument("input")
    ap.add_argument("-o", "--output", default=None, help="output image (default <input>.png)")
    args = ap.parse_args()

    df = pd.read_csv(args.input)
    fig, ax = plt.subplots(figsize=(7, 4.5), dpi=140)
    KINDS[args.kind](df, ax)
    out = args.output or f"{args.input}.png"
    fig.tight_layout()
    fig.savefig(out)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
