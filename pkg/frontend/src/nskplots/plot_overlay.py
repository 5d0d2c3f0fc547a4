"""Overlay of two profile CSVs (numeric vs exact), or a multiplier-decay
scatter when the inputs carry (omega, lambda) columns.

Usage: nsk-plot-overlay NUMERIC.csv EXACT.csv -o OUT.png
       nsk-plot-overlay DECAY.csv -o OUT.png
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .common import InputError, new_figure, read_csv, run_cli, save


def _rho_column(data):
    names = data.dtype.names or ()
    for col in ("rho", "v"):
        if col in names:
            return data[col]
    raise InputError(f"no density column among {names}")


def render(paths, out_path, labels=("numeric", "exact")) -> None:
    fig = new_figure()
    ax = fig.add_subplot(111)
    first = read_csv(paths[0])
    names = first.dtype.names or ()
    if "omega" in names and "lambda" in names:
        ax.loglog(first["omega"], np.abs(first["lambda"]), "o-")
        ax.set_xlabel("period")
        ax.set_ylabel("|multiplier|")
        ax.set_title("multiplier decay with period")
    else:
        if len(paths) < 2:
            raise InputError("profile overlay needs two CSV files")
        for path, label, style in zip(paths, labels, ("-", "--")):
            data = read_csv(path, required=("x",))
            ax.plot(data["x"], _rho_column(data), style, label=label)
        ax.set_xlabel("x")
        ax.set_ylabel("density")
        ax.set_title("numeric vs exact density")
        ax.legend(loc="best")
    save(fig, out_path)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args(argv)
    return run_cli(lambda _: render(args.inputs, args.output))


if __name__ == "__main__":
    sys.exit(main())
