"""State panel: density, velocity, interface speed line, and mass flux.

Usage: nsk-plot-state SNAPSHOT.csv SERIES.csv -o OUT.png
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .common import InputError, new_figure, read_csv, run_cli, save


def render(snapshot_path, series_path, out_path) -> None:
    snap = read_csv(snapshot_path, required=("x", "rho", "u"))
    series = read_csv(series_path, required=("t", "c_interface"))
    c_raw = np.atleast_1d(series["c_interface"])
    c = float(np.mean(c_raw[-5:]))  # 5-point tail average of the raw speeds
    x, rho, u = snap["x"], snap["rho"], snap["u"]
    flux = rho * (u - c)

    fig = new_figure()
    ax = fig.add_subplot(111)
    ax.plot(x, rho, label="density")
    ax.plot(x, u, label="velocity")
    ax.axhline(c, linestyle="--", label=f"interface speed c = {c:.4g}")
    ax.plot(x, flux, label="mass flux rho (u - c)")
    ax.set_xlabel("x")
    t_end = float(np.atleast_1d(series["t"])[-1])
    ax.set_title(f"state at t = {t_end:g}")
    ax.legend(loc="upper right")
    save(fig, out_path)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("snapshot")
    p.add_argument("series")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args(argv)
    return run_cli(lambda _: render(args.snapshot, args.series, args.output))


if __name__ == "__main__":
    sys.exit(main())
