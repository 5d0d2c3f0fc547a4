"""Modified energy with its two tangent lines at the density extremes.

Usage: nsk-plot-bitangent REPORT.txt PSI_M_SAMPLES.csv -o OUT.png
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .common import InputError, new_figure, read_csv, read_keyvalues, run_cli, save


def render(report_path, samples_path, out_path) -> None:
    rep = read_keyvalues(report_path)
    for key in ("rho_min", "rho_max", "slope_g", "intercept_g", "slope_l", "intercept_l"):
        if key not in rep:
            raise InputError(f"{report_path}: missing key {key!r}")
    samples = read_csv(samples_path, required=("rho", "psi_m"))
    rho, psi = samples["rho"], samples["psi_m"]

    fig = new_figure()
    ax = fig.add_subplot(111)
    ax.plot(rho, psi, label="modified energy")
    for side, color in (("g", "#d62728"), ("l", "#2ca02c")):
        s, b = rep[f"slope_{side}"], rep[f"intercept_{side}"]
        ax.plot(rho, s * rho + b, "--", color=color, label=f"tangent at rho_{side}")
    for key in ("rho_min", "rho_max"):
        r = rep[key]
        s, b = (rep["slope_g"], rep["intercept_g"]) if key == "rho_min" else (
            rep["slope_l"], rep["intercept_l"])
        ax.plot([r], [s * r + b], "ko", markersize=6)
    ax.set_xlabel("density")
    ax.set_ylabel("modified energy")
    ax.set_title(f"tangent-line match (m = {rep.get('m_est', 0.0):.4g})")
    ax.legend(loc="best")
    save(fig, out_path)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("report")
    p.add_argument("samples")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args(argv)
    return run_cli(lambda _: render(args.report, args.samples, args.output))


if __name__ == "__main__":
    sys.exit(main())
