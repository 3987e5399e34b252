#!/usr/bin/env python3
"""Render regret curves and instantaneous-reward plots from experiment CSVs.

Usage:
  python3 scripts/plot_regret.py out/toy_coverage [--traces] [--window 100]

Reads summary.csv in the given output directory and writes regret_curves.png
(mean cumulative regret vs horizon, log-log, with standard-error bars).  With
--traces it also renders smoothed instantaneous rewards from any trace_*.csv
files present.
"""
import argparse
import collections
import csv
import pathlib
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def plot_summary(out_dir: pathlib.Path) -> None:
    rows = list(csv.DictReader(open(out_dir / "summary.csv")))
    by_alg = collections.defaultdict(list)
    for r in rows:
        by_alg[r["algorithm"]].append(
            (int(r["horizon"]), float(r["mean_regret"]), float(r["se_regret"])))
    fig, ax = plt.subplots(figsize=(5, 4))
    for alg, pts in by_alg.items():
        pts.sort()
        ax.errorbar([p[0] for p in pts], [p[1] for p in pts],
                    yerr=[p[2] for p in pts], marker="o", capsize=3, label=alg)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("mean cumulative regret")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "regret_curves.png", dpi=150)
    print(f"wrote {out_dir / 'regret_curves.png'}")


def moving_average(xs, window):
    out, acc = [], 0.0
    for i, x in enumerate(xs):
        acc += x
        if i >= window:
            acc -= xs[i - window]
        out.append(acc / min(i + 1, window))
    return out


def plot_traces(out_dir: pathlib.Path, window: int) -> None:
    traces = sorted(out_dir.glob("trace_*.csv"))
    if not traces:
        print("no trace_*.csv files found", file=sys.stderr)
        return
    fig, ax = plt.subplots(figsize=(5, 4))
    for path in traces[:8]:
        rewards = [float(r["reward"]) for r in csv.DictReader(open(path))]
        ax.plot(moving_average(rewards, window), linewidth=0.8,
                label=path.stem.removeprefix("trace_"))
    ax.set_xlabel("round t")
    ax.set_ylabel(f"reward (moving average, window {window})")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(out_dir / "instantaneous_reward.png", dpi=150)
    print(f"wrote {out_dir / 'instantaneous_reward.png'}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--traces", action="store_true")
    parser.add_argument("--window", type=int, default=100)
    args = parser.parse_args()
    plot_summary(args.out_dir)
    if args.traces:
        plot_traces(args.out_dir, args.window)


if __name__ == "__main__":
    main()
