"""Shared plumbing: CSV readers, deterministic styling, PNG output.

These scripts are pure readers of the simulator's CSV/key=value outputs; no
numerical post-processing happens here beyond plotting transforms.
"""

from __future__ import annotations

import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

#: fixed 1200 x 800 canvas
FIGSIZE = (12.0, 8.0)
DPI = 100

STYLE = {
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.prop_cycle": plt.cycler(
        color=["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    ),
    "figure.autolayout": True,
}


class InputError(RuntimeError):
    pass


def read_csv(path, required=()):
    """Named-column CSV reader; comment lines starting with '#' are skipped."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
    names = data.dtype.names or ()
    for col in required:
        if col not in names:
            raise InputError(f"{path}: missing column {col!r} (has {names})")
    return data


def read_keyvalues(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def new_figure():
    plt.rcParams.update(STYLE)
    return plt.figure(figsize=FIGSIZE, dpi=DPI)


def save(fig, out_path):
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", dpi=DPI)
    plt.close(fig)


def run_cli(fn, argv=None) -> int:
    try:
        fn(argv)
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
