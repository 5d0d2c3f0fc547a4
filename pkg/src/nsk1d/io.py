"""File formats: snapshot/series CSV, flat key=value configs, run manifest."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .hermite import HermiteField, PeriodicGrid
from .solver import FluidState, SimConfig

__all__ = [
    "ConfigError",
    "parse_config",
    "config_to_simconfig",
    "snapshot_to_csv",
    "snapshot_from_csv",
    "write_manifest",
]

CONFIG_KEYS = {
    "nx": int,
    "dt": float,
    "t_end": float,
    "eps": float,
    "mu_bar": float,
    "init": str,
    "init_amplitude": float,
    "ubar": float,
    "snapshot_every": int,
    "series_every": int,
    "cfl_check": bool,
    "outdir": str,
}


class ConfigError(ValueError):
    pass


def _parse_number(text: str) -> float:
    """Float literal, or an integer fraction like 1/120000."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def parse_config(path) -> dict:
    """Flat key = value text; '#' starts a comment; unknown keys are errors."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        typ = CONFIG_KEYS[key]
        try:
            if typ is bool:
                if value.lower() in ("1", "true", "yes", "on"):
                    out[key] = True
                elif value.lower() in ("0", "false", "no", "off"):
                    out[key] = False
                else:
                    raise ValueError(value)
            elif typ is int:
                out[key] = int(value)
            elif typ is float:
                out[key] = _parse_number(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def config_to_simconfig(mapping: dict) -> SimConfig:
    kwargs = {k: v for k, v in mapping.items() if k != "outdir"}
    try:
        return SimConfig(**kwargs, outdir=mapping.get("outdir"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def snapshot_to_csv(state: FluidState, path) -> None:
    """Columns x, rho, rho_x, u, u_x at 17 significant digits."""
    x = state.grid.nodes
    with open(path, "w", newline="") as fh:
        fh.write("x,rho,rho_x,u,u_x\n")
        for row in zip(x, state.rho.values, state.rho.derivs, state.u.values, state.u.derivs):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def snapshot_from_csv(path, t: float = 0.0) -> FluidState:
    data = np.genfromtxt(path, delimiter=",", names=True)
    for col in ("x", "rho", "rho_x", "u", "u_x"):
        if col not in (data.dtype.names or ()):
            raise ConfigError(f"{path}: missing column {col!r}")
    grid = PeriodicGrid(len(data["x"]))
    return FluidState(
        HermiteField(grid, np.asarray(data["rho"]), np.asarray(data["rho_x"])),
        HermiteField(grid, np.asarray(data["u"]), np.asarray(data["u_x"])),
        t,
    )


def write_manifest(
    path, config: dict, files: list[str], wall_clock: float, summary: dict, status: str = "ok"
) -> None:
    """Key = value run manifest; written last, listing only existing files."""
    lines = [f"version = 0.1.0", f"status = {status}", f"wall_clock_s = {wall_clock:.3f}"]
    for k, v in sorted(config.items()):
        lines.append(f"config_{k} = {v}")
    existing = [f for f in files if Path(f).exists()]
    lines.append(f"n_files = {len(existing)}")
    lines.append("files = " + ",".join(str(Path(f).name) for f in existing))
    for k, v in summary.items():
        lines.append(f"{k} = {v}")
    Path(path).write_text("\n".join(lines) + "\n")
