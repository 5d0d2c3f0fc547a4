"""Command-line driver: simulate | twave | exact | diagnose | sweep.

Exit codes: 0 success, 2 configuration/input errors, 3 runtime failures
(blow-up; partial outputs are kept).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import itertools
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import bitangency_check, flux_stats, interface_position
from .elliptic import CnoidalWave
from .energy import quartic_model
from .io import (
    ConfigError,
    config_to_simconfig,
    parse_config,
    snapshot_from_csv,
    snapshot_to_csv,
    write_manifest,
)
from .solver import BlowUpError, SolverError, cfl_bound, initial_state, run
from .twave import (
    TwaveError,
    kink_profile,
    minimize_periodic,
    profile_to_csv,
    solve_periodic_orbit,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _write_outputs(outdir: Path, result, config_echo: dict, wall: float, status: str) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for step, state in result.snapshots:
        p = outdir / f"snap_{step:06d}.csv"
        snapshot_to_csv(state, p)
        files.append(str(p))
    series_path = outdir / "series.csv"
    result.series.to_csv(series_path)
    files.append(str(series_path))
    s = result.series
    summary = {
        "final_t": f"{s.t[-1]:.17g}",
        "final_mass": f"{s.mass[-1]:.17g}",
        "final_energy": f"{s.energy[-1]:.17g}",
        "final_xbar": f"{s.xbar[-1]:.17g}",
        "final_c": f"{s.smoothed_c()[-1]:.17g}",
        "final_flux_mean": f"{s.flux_mean[-1]:.17g}",
    }
    write_manifest(outdir / "manifest.txt", config_echo, files, wall, summary, status)


def cmd_simulate(args) -> int:
    try:
        mapping = parse_config(args.config)
        if args.outdir:
            mapping["outdir"] = args.outdir
        cfg = config_to_simconfig(mapping)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dry_run:
        state = initial_state(cfg)
        umax = float(np.max(np.abs(state.u.values)))
        print(f"config ok: nx={cfg.nx} dt={cfg.dt:.6g} t_end={cfg.t_end} steps={cfg.n_steps()}")
        print(f"cfl bound at t=0: {cfl_bound(cfg, umax):.6g} (dt/bound = {cfg.dt / cfl_bound(cfg, umax):.3f})")
        return EXIT_OK
    outdir = Path(cfg.outdir or "out")
    t0 = time.perf_counter()
    try:
        result = run(cfg)
    except BlowUpError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        if exc.partial is not None:
            _write_outputs(outdir, exc.partial, mapping, time.perf_counter() - t0, "blowup")
        return EXIT_RUNTIME
    except SolverError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _write_outputs(outdir, result, mapping, time.perf_counter() - t0, "ok")
    print(f"wrote {outdir}/ ({len(result.snapshots)} snapshots)")
    return EXIT_OK


def cmd_twave(args) -> int:
    model = quartic_model(m=args.m)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        if args.method == "minimize":
            prof = minimize_periodic(model, args.eps, args.omega, args.avg)
        elif args.method == "orbit":
            seed = None
            if args.seed_minimizer:
                seed = minimize_periodic(model, args.eps, args.omega, args.avg)
            prof = solve_periodic_orbit(model, args.eps, args.omega, args.avg, seed=seed)
        else:
            prof = kink_profile(model, args.eps)
    except TwaveError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    csv_path = outdir / f"profile_{args.method}.csv"
    profile_to_csv(prof, csv_path, u1=args.u1)
    report = outdir / f"report_{args.method}.txt"
    lines = [
        f"method = {args.method}",
        f"omega = {prof.omega:.17g}",
        f"lambda = {prof.lam:.17g}",
        f"m = {prof.m:.17g}",
        f"average = {prof.average:.17g}",
    ]
    for k, v in prof.meta.items():
        if isinstance(v, (int, float)):
            lines.append(f"{k} = {v:.17g}" if isinstance(v, float) else f"{k} = {v}")
    report.write_text("\n".join(lines) + "\n")
    print(f"wrote {csv_path} and {report}")
    return EXIT_OK


def cmd_exact(args) -> int:
    try:
        wave = CnoidalWave.from_eps(args.eps)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    x = np.arange(args.nx) / args.nx
    xs = x - args.ubar * args.t
    if args.pi_variant:
        rho = wave.rho_printed_variant(xs)
        drho = np.gradient(rho, x)  # comparison-only output
    else:
        rho = wave.rho(xs)
        drho = wave.drho(xs)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write("x,rho,rho_x,u,u_x\n")
        for row in zip(x, rho, drho, np.full_like(x, args.ubar), np.zeros_like(x)):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    print(f"wrote {out} (k={wave.k:.12g}, residual={wave.residual():.3e})")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    try:
        state = snapshot_from_csv(args.snapshot)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    model = quartic_model()
    pos = interface_position(state.rho, 1.5)
    if pos is None:
        print("interface = none")
        c = args.c
    else:
        print(f"interface = {pos:.12g}")
        c = args.c
    stats = flux_stats(state.rho.values, state.u.values, c)
    print(f"flux_mean = {stats['mean']:.12g}")
    print(f"flux_std = {stats['std']:.12g}")
    m_est = stats["mean"]
    rep = bitangency_check(state.rho.values, model, m_est)
    print(rep.to_text(), end="")
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "bitangency_report.txt").write_text(rep.to_text())
        # modified-energy samples for the tangent-line figure
        rho = np.linspace(max(0.2, rep.rho_min - 0.3), rep.rho_max + 0.3, 400)
        mod = model.with_m(m_est)
        with open(outdir / "psi_m_samples.csv", "w", newline="") as fh:
            fh.write("rho,psi_m\n")
            for r, p in zip(rho, mod.psi_m(rho)):
                fh.write(f"{r:.17g},{p:.17g}\n")
        print(f"wrote {outdir}/bitangency_report.txt and psi_m_samples.csv")
    return EXIT_OK


def _sweep_cell(payload):
    mapping, outdir = payload
    mapping = dict(mapping)
    mapping["outdir"] = str(outdir)
    cfg = config_to_simconfig(mapping)
    t0 = time.perf_counter()
    try:
        result = run(cfg)
    except BlowUpError as exc:
        if exc.partial is not None:
            _write_outputs(Path(outdir), exc.partial, mapping, time.perf_counter() - t0, "blowup")
        return mapping, "blowup"
    _write_outputs(Path(outdir), result, mapping, time.perf_counter() - t0, "ok")
    return mapping, "ok"


def cmd_sweep(args) -> int:
    try:
        base = parse_config(args.config)
        grid: list[tuple[str, list[float]]] = []
        for spec in args.vary:
            key, _, values = spec.partition("=")
            if key not in base and key not in ("mu_bar", "eps", "nx", "dt", "t_end"):
                raise ConfigError(f"cannot vary unknown key {key!r}")
            parsed = []
            for v in values.split(","):
                parsed.append(int(v) if key == "nx" else float(v))
            grid.append((key, parsed))
        if not grid:
            raise ConfigError("sweep needs at least one --vary key=v1,v2,...")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outroot = Path(args.outdir)
    outroot.mkdir(parents=True, exist_ok=True)
    cells = []
    for combo in itertools.product(*(vals for _, vals in grid)):
        mapping = dict(base)
        name_parts = []
        for (key, _), val in zip(grid, combo):
            mapping[key] = val
            name_parts.append(f"{key}={val:g}" if isinstance(val, float) else f"{key}={val}")
        cell_dir = outroot / "_".join(name_parts)
        cells.append((mapping, cell_dir))
    results = []
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]
    summary = outroot / "summary.csv"
    keys = [k for k, _ in grid]
    with open(summary, "w", newline="") as fh:
        fh.write(",".join(keys) + ",status,outdir\n")
        for (mapping, status), (_, cell_dir) in zip(results, cells):
            fh.write(
                ",".join(f"{mapping[k]:.17g}" if isinstance(mapping[k], float) else str(mapping[k]) for k in keys)
                + f",{status},{cell_dir.name}\n"
            )
    print(f"wrote {summary}")
    n_fail = sum(1 for _, status in results if status != "ok")
    return EXIT_OK if n_fail < len(results) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsk1d", description=__doc__)
    p.add_argument("--version", action="version", version=f"nsk1d {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run the initial value problem from a config file")
    ps.add_argument("config")
    ps.add_argument("--outdir", default=None)
    ps.add_argument("--dry-run", action="store_true")
    ps.add_argument("--seed", type=int, default=None, help="reserved")
    ps.set_defaults(func=cmd_simulate)

    pt = sub.add_parser("twave", help="construct a traveling-wave profile")
    pt.add_argument("--method", choices=("minimize", "orbit", "kink"), required=True)
    pt.add_argument("--eps", type=float, required=True)
    pt.add_argument("--omega", type=float, default=1.0)
    pt.add_argument("--avg", type=float, default=1.5)
    pt.add_argument("--m", type=float, default=0.0)
    pt.add_argument("--u1", type=float, default=0.0)
    pt.add_argument("--seed-minimizer", action="store_true",
                    help="seed the orbit solver from the energy minimizer")
    pt.add_argument("--outdir", default="twave_out")
    pt.set_defaults(func=cmd_twave)

    pe = sub.add_parser("exact", help="sample the exact cnoidal solution")
    pe.add_argument("--eps", type=float, required=True)
    pe.add_argument("--ubar", type=float, default=2.0)
    pe.add_argument("--t", type=float, default=0.0)
    pe.add_argument("--nx", type=int, default=300)
    pe.add_argument("-o", "--output", default="exact.csv")
    pe.add_argument("--pi-variant", action="store_true",
                    help="evaluate the period-pi printed variant of the profile")
    pe.set_defaults(func=cmd_exact)

    pd = sub.add_parser("diagnose", help="interface/flux/tangency report for a snapshot")
    pd.add_argument("snapshot")
    pd.add_argument("--c", type=float, default=0.0, help="wave speed for the flux")
    pd.add_argument("--outdir", default=None)
    pd.set_defaults(func=cmd_diagnose)

    pw = sub.add_parser("sweep", help="run a parameter grid of simulations")
    pw.add_argument("--config", required=True)
    pw.add_argument("--vary", action="append", default=[], metavar="key=v1,v2")
    pw.add_argument("--outdir", default="sweep_out")
    pw.add_argument("--jobs", type=int, default=1)
    pw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
