#!/usr/bin/env python3
"""Render PNG figures from the CSV artifacts of a gpwave run directory.

Usage: plot_run.py RUN_DIR [RUN_DIR ...]

Figures are written next to the data they come from. A sweep directory is
recursed into via its index.csv. Plotting stays out of the solver binaries on
purpose: every figure here is reproducible from the CSV files alone.
"""

import argparse
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv(path, comment="#"):
    """Columns as {name: [floats]}; string columns stay strings."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith(comment)]
    header, data = rows[0], rows[1:]
    cols = {name: [] for name in header}
    for row in data:
        for name, cell in zip(header, row):
            try:
                cols[name].append(float(cell))
            except ValueError:
                cols[name].append(cell)
    return cols


def save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    print(f"wrote {path}")


def plot_variational(path):
    d = read_csv(path)
    fig, (ax_q, ax_s) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ax_q.plot(d["t"], d["q"], label="q")
    ax_q.plot(d["t"], d["p"], label="p", alpha=0.7)
    ax_q.set_ylabel("center")
    ax_q.legend(loc="upper right")
    ax_s.plot(d["t"], d["sigma"], label="sigma")
    ax_s.plot(d["t"], d["sigma_dot"], label="sigma_dot", alpha=0.7)
    ax_s.set_xlabel("t")
    ax_s.set_ylabel("width")
    ax_s.legend(loc="upper right")
    save(fig, path.with_name("variational.png"))


def plot_observables(path):
    d = read_csv(path)
    fig, axes = plt.subplots(2, 2, sharex=True, figsize=(8, 5))
    for ax, key in zip(axes.flat, ("norm", "mean_x", "var_x", "energy")):
        ax.plot(d["t"], d[key])
        ax.set_title(key)
    for ax in axes[1]:
        ax.set_xlabel("t")
    save(fig, path.with_name("observables.png"))


def plot_comparison(path):
    d = read_csv(path)
    fig, (ax_c, ax_w, ax_e) = plt.subplots(3, 1, sharex=True, figsize=(7, 7))
    ax_c.plot(d["t"], d["q_var"], label="q (reduced)")
    ax_c.plot(d["t"], d["mean_x_pde"], "--", label="<x> (spectral)")
    ax_c.set_ylabel("center")
    ax_c.legend(loc="upper right")
    ax_w.plot(d["t"], d["half_sigma_var"], label="sigma/2 (reduced)")
    ax_w.plot(d["t"], d["var_x_pde"], "--", label="var_x (spectral)")
    ax_w.set_ylabel("width")
    ax_w.legend(loc="upper right")
    ax_e.semilogy(d["t"], d["abs_err_x"], label="|center error|")
    ax_e.semilogy(d["t"], d["abs_err_var"], label="|width error|")
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("error")
    ax_e.legend(loc="lower right")
    save(fig, path.with_name("comparison.png"))


def plot_trajectories(path):
    d = read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key in d:
        if key.startswith("x_"):
            ax.plot(d["t"], d[key], lw=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("pathline position")
    save(fig, path.with_name("trajectories.png"))


def plot_residuals(path):
    d = read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key in ("continuity_max", "hamilton_jacobi_max", "euler_max"):
        ax.semilogy(d["t_mid"], d[key], label=key)
    ax.set_xlabel("t midpoint")
    ax.set_ylabel("residual max-norm")
    ax.legend(loc="upper right")
    save(fig, path.with_name("residuals.png"))


def plot_convergence(path):
    d = read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    studies = sorted(set(d["study"]))
    for study in studies:
        hs = [h for s, h in zip(d["study"], d["h"]) if s == study]
        es = [e for s, e in zip(d["study"], d["error"]) if s == study]
        pts = [(h, e) for h, e in zip(hs, es) if e > 0]
        if pts:
            ax.loglog(*zip(*pts), "o-", label=study)
    ax.set_xlabel("step size h")
    ax.set_ylabel("successive-rung error")
    ax.legend(loc="lower right", fontsize=8)
    save(fig, path.with_name("convergence.png"))


def plot_snapshots(run_dir):
    pairs = [p for p in run_dir.glob("snapshot_*.csv") if p.is_file()]
    if not pairs:
        return
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in sorted(pairs):
        d = read_csv_snapshot(path)
        label = path.stem.replace("snapshot_", "")
        ax.plot(d["x"], [re * re + im * im for re, im in zip(d["re"], d["im"])],
                label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("|psi|^2")
    ax.legend(loc="upper right")
    save(fig, run_dir / "snapshots.png")


def read_csv_snapshot(path):
    xs, res, ims = [], [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            x, re, im = line.strip().split(",")
            xs.append(float(x))
            res.append(float(re))
            ims.append(float(im))
    return {"x": xs, "re": res, "im": ims}


def process(run_dir):
    run_dir = pathlib.Path(run_dir)
    if not run_dir.is_dir():
        print(f"{run_dir}: not a directory", file=sys.stderr)
        return 1
    index = run_dir / "index.csv"
    if index.is_file():  # sweep: recurse into the point directories
        d = read_csv(index)
        status = 0
        for sub in d["dir"]:
            status |= process(run_dir / sub)
        return status
    handlers = {
        "variational.csv": plot_variational,
        "observables.csv": plot_observables,
        "comparison.csv": plot_comparison,
        "trajectories.csv": plot_trajectories,
        "residuals.csv": plot_residuals,
        "convergence.csv": plot_convergence,
    }
    found = False
    for name, handler in handlers.items():
        path = run_dir / name
        if path.is_file():
            handler(path)
            found = True
    plot_snapshots(run_dir)
    if not found and not list(run_dir.glob("snapshot_*.csv")):
        print(f"{run_dir}: no known CSV artifacts", file=sys.stderr)
        return 1
    return 0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run_dirs", nargs="+", help="run output directories")
    args = parser.parse_args()
    status = 0
    for run_dir in args.run_dirs:
        status |= process(run_dir)
    return status


if __name__ == "__main__":
    sys.exit(main())
