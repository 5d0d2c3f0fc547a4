"""Strang-split CIP time integrator for the 1-D isothermal NSK/EK system.

One step is A(dt/2) B(dt) A(dt/2): stage A traces characteristics of the
current velocity backward with RK4 and transports density (conservative
form, with the characteristic Jacobian) and velocity (values and slopes,
the classic CIP update); stage B is an explicit nodal update of (u, u_x)
with the viscous, pressure-gradient and dispersive terms evaluated by the
D2/D3/D4 stencils.  Density is untouched by stage B.  Each stage consumes
the most recent fields.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .diagnostics import DiagnosticSeries, interface_position, interface_velocity
from .elliptic import CnoidalWave
from .energy import EnergyModel, NoBitangentError, bitangent, quartic_model
from .hermite import HermiteField, PeriodicGrid

logger = logging.getLogger(__name__)

__all__ = [
    "FluidState",
    "SimConfig",
    "SimResult",
    "Characteristics",
    "SolverError",
    "VacuumError",
    "BlowUpError",
    "CflError",
    "CharacteristicCrossingError",
    "initial_state",
    "trace_characteristics",
    "advect_density",
    "advect_velocity",
    "source_step",
    "strang_step",
    "total_energy",
    "cfl_bound",
    "run",
]


class SolverError(RuntimeError):
    pass


class VacuumError(SolverError):
    pass


class BlowUpError(SolverError):
    def __init__(self, msg, step=None, partial=None):
        super().__init__(msg)
        self.step = step
        self.partial = partial


class CflError(SolverError):
    pass


class CharacteristicCrossingError(SolverError):
    pass


@dataclass(frozen=True)
class FluidState:
    """Density and velocity Hermite fields at time t."""

    rho: HermiteField
    u: HermiteField
    t: float = 0.0

    @property
    def grid(self) -> PeriodicGrid:
        return self.rho.grid

    def mass(self) -> float:
        return self.rho.integral()


@dataclass(frozen=True)
class Characteristics:
    """Departure points (feet), their x-derivative (Jacobian) and its slope."""

    feet: np.ndarray
    jac: np.ndarray
    jacp: np.ndarray


@dataclass
class SimConfig:
    nx: int = 300
    dt: float = 1.0 / 120000.0
    t_end: float = 1.0
    eps: float = 1e-4
    mu_bar: float = 1e-1
    energy: EnergyModel = field(default_factory=quartic_model)
    init: str = "slab"
    init_amplitude: float = 0.3
    ubar: float = 0.0
    snapshot_every: int = 0
    series_every: int = 1
    cfl_check: bool = True
    outdir: str | None = None

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.nx < 8:
            raise ValueError("nx must be at least 8")
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if self.mu_bar < 0.0:
            raise ValueError("mu_bar must be nonnegative")

    @property
    def h(self) -> float:
        return 1.0 / self.nx

    def n_steps(self) -> int:
        n = self.t_end / self.dt
        n_round = round(n)
        if abs(n - n_round) > 1e-8 * max(1.0, n):
            n_round = math.ceil(n)
        return int(n_round)


@dataclass
class SimResult:
    config: SimConfig
    snapshots: list  # (step index, FluidState)
    series: DiagnosticSeries
    final: FluidState


def initial_state(cfg: SimConfig) -> FluidState:
    grid = PeriodicGrid(cfg.nx)
    if cfg.init == "slab":
        # pre-separated phases connected by smooth fronts of unequal widths.
        # Symmetric initial data (a pure sine with u0 = 0 is reflection
        # symmetric, and the dynamics preserves that symmetry exactly) can
        # never develop net through-interface mass flux; starting from
        # formed interfaces also avoids the violent decomposition transient
        # whose breathing pollutes the traveling state for dozens of time
        # units at small viscosity.
        x1, x2, w1, w2 = 0.2, 0.7, 0.015, 0.03

        def s_val(x):
            out = np.zeros_like(np.asarray(x, dtype=float))
            for k in (-1.0, 0.0, 1.0):
                out = out + 0.5 * (np.tanh((x + k - x1) / w1) - np.tanh((x + k - x2) / w2))
            return 1.0 + out

        def s_der(x):
            out = np.zeros_like(np.asarray(x, dtype=float))
            for k in (-1.0, 0.0, 1.0):
                out = out + 0.5 * (
                    np.cosh((x + k - x1) / w1) ** -2 / w1
                    - np.cosh((x + k - x2) / w2) ** -2 / w2
                )
            return out

        rho = HermiteField.from_callable(grid, s_val, s_der)
    elif cfg.init == "sine":
        # two-harmonic profile; the phase-shifted overtone breaks the
        # reflection symmetry of a pure sine
        a = cfg.init_amplitude
        b = a / 3.0
        rho = HermiteField.from_callable(
            grid,
            lambda x: 1.5 + a * np.sin(2.0 * np.pi * x) + b * np.sin(4.0 * np.pi * x + 1.0),
            lambda x: 2.0 * np.pi * a * np.cos(2.0 * np.pi * x)
            + 4.0 * np.pi * b * np.cos(4.0 * np.pi * x + 1.0),
        )
    elif cfg.init == "cnoidal":
        wave = CnoidalWave.from_eps(cfg.eps)
        rho = HermiteField.from_callable(grid, wave.rho, wave.drho)
    elif cfg.init == "constant":
        rho = HermiteField.constant(grid, 1.5)
    else:
        raise ValueError(f"unknown init {cfg.init!r} (slab | sine | cnoidal | constant)")
    u = HermiteField.constant(grid, cfg.ubar)
    return FluidState(rho, u, 0.0)


def trace_characteristics(
    w: HermiteField, tau: float, cfl_check: bool = False
) -> Characteristics:
    """Backward RK4 characteristic feet of the frozen velocity field w.

    The Jacobian dX/dx and its derivative d2X/dx2 are integrated along the
    same stages via the first and second variational equations.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    feet, jac, jacp, disp = K.trace_rk4(w.values, w.derivs, w.grid.h, tau, w.grid.nodes)
    if cfl_check and disp > w.grid.h:
        raise CflError(
            f"characteristic stage displacement {disp:.3e} exceeds one cell {w.grid.h:.3e}"
        )
    return Characteristics(feet, jac, jacp)


def advect_density(rho: HermiteField, chars: Characteristics) -> HermiteField:
    if np.any(chars.jac <= 0.0):
        raise CharacteristicCrossingError("nonpositive characteristic Jacobian")
    nv, nd = K.advect_density(rho.values, rho.derivs, rho.grid.h, chars.feet, chars.jac, chars.jacp)
    return HermiteField(rho.grid, nv, nd)


def advect_velocity(u: HermiteField, chars: Characteristics) -> HermiteField:
    if np.any(chars.jac <= 0.0):
        raise CharacteristicCrossingError("nonpositive characteristic Jacobian")
    nv, nd = K.advect_velocity(u.values, u.derivs, u.grid.h, chars.feet, chars.jac)
    return HermiteField(u.grid, nv, nd)


def source_step(state: FluidState, cfg: SimConfig, tau: float) -> FluidState:
    """Explicit update of (u, u_x) with the non-advective terms; rho untouched."""
    rv = state.rho.values
    if np.any(rv <= 0.0):
        raise VacuumError(f"nonpositive density at t={state.t:.6g}")
    w2 = cfg.energy.d2psi(rv)
    w3 = cfg.energy.d3psi_or_fd(rv)
    du, dux = K.source_terms(
        rv, state.rho.derivs, state.u.values, state.u.derivs,
        state.grid.h, cfg.eps, cfg.mu_bar, w2, w3,
    )
    u = HermiteField(
        state.grid, state.u.values + tau * du, state.u.derivs + tau * dux
    )
    return FluidState(state.rho, u, state.t)


def _advection_stage(state: FluidState, cfg: SimConfig, tau: float) -> FluidState:
    # fused kernel: trace + transport of both fields + proportional mass
    # fixer (the remap conserves only to interpolation accuracy; the
    # O(1e-12) rescale stops secular drift)
    nrv, nrd, nuv, nud, disp, status = K.advect_stage(
        state.rho.values, state.rho.derivs, state.u.values, state.u.derivs,
        state.grid.h, tau,
    )
    if status:
        raise CharacteristicCrossingError("nonpositive characteristic Jacobian")
    if cfg.cfl_check and disp > state.grid.h:
        raise CflError(
            f"characteristic stage displacement {disp:.3e} exceeds one cell {state.grid.h:.3e}"
        )
    grid = state.grid
    return FluidState(
        HermiteField(grid, nrv, nrd), HermiteField(grid, nuv, nud), state.t
    )


def strang_step(state: FluidState, cfg: SimConfig) -> FluidState:
    half = 0.5 * cfg.dt
    s = _advection_stage(state, cfg, half)
    s = source_step(s, cfg, cfg.dt)
    s = _advection_stage(s, cfg, half)
    return FluidState(s.rho, s.u, state.t + cfg.dt)


def total_energy(state: FluidState, model: EnergyModel, eps: float) -> float:
    """int ( Psi(rho) + rho u^2 / 2 + eps rho_x^2 / 2 ) dx by nodal quadrature."""
    r, rx, u = state.rho.values, state.rho.derivs, state.u.values
    dens = model.psi(r) + 0.5 * r * u * u + 0.5 * eps * rx * rx
    return float(np.sum(dens)) * state.grid.h


def cfl_bound(cfg: SimConfig, umax: float) -> float:
    """0.9 min( h/max|u|, h^2/sqrt(eps), h^2 min(rho)/(2 mu_bar) )."""
    h = cfg.h
    bound = h * h / math.sqrt(cfg.eps)
    if umax > 0.0:
        bound = min(bound, h / umax)
    if cfg.mu_bar > 0.0:
        bound = min(bound, 0.5 * h * h / cfg.mu_bar)  # against min(rho) ~ 1
    return 0.9 * bound


class _Recorder:
    """Accumulates the series; flux statistics need the interface velocity,
    so spatial moments are stored per record and combined after the run."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        try:
            bit = bitangent(cfg.energy.with_m(0.0))
            self.level = 0.5 * (bit.rho_g + bit.rho_l)
        except NoBitangentError:
            self.level = None
        self.rows: list[list[float]] = []
        self.moments: list[list[float]] = []
        self._prev_wrapped: float | None = None
        self._offset = 0.0

    def record(self, state: FluidState) -> None:
        cfg = self.cfg
        r, u = state.rho.values, state.u.values
        h = state.grid.h
        mass = float(np.sum(r)) * h
        en = total_energy(state, cfg.energy, cfg.eps)
        if self.level is None:
            xbar = math.nan
        else:
            pos = interface_position(state.rho, self.level, prev=self._prev_wrapped)
            if pos is None:
                xbar = math.nan
                self._prev_wrapped = None
            else:
                if self._prev_wrapped is not None:
                    delta = pos - self._prev_wrapped
                    if delta > 0.5:
                        self._offset -= 1.0
                    elif delta < -0.5:
                        self._offset += 1.0
                self._prev_wrapped = pos
                xbar = self._offset + pos
        ru = r * u
        self.moments.append(
            [
                float(np.mean(ru)),
                float(np.mean(ru * ru)),
                float(np.mean(r * r)),
                float(np.mean(r * ru)),
                float(np.mean(r)),
            ]
        )
        self.rows.append(
            [
                state.t,
                mass,
                en,
                xbar,
                float(np.max(np.abs(u))),
                float(np.min(r)),
                float(np.max(r)),
            ]
        )

    def build(self) -> DiagnosticSeries:
        rows = np.asarray(self.rows)
        mom = np.asarray(self.moments)
        t, mass, en, xbar, umax, rmin, rmax = rows.T
        if len(t) >= 3 and np.all(np.isfinite(xbar)):
            c = interface_velocity(t, xbar)
        else:
            c = np.zeros_like(t)
        e_ru, e_ru2, e_r2, e_r2u, e_r = mom.T
        flux_mean = e_ru - c * e_r
        flux_sq = e_ru2 - 2.0 * c * e_r2u + c * c * e_r2
        flux_std = np.sqrt(np.maximum(flux_sq - flux_mean * flux_mean, 0.0))
        return DiagnosticSeries(
            t=t, mass=mass, energy=en, xbar=xbar, c_interface=c,
            flux_mean=flux_mean, flux_std=flux_std,
            umax=umax, rhomin=rmin, rhomax=rmax,
        )


def run(cfg: SimConfig, on_snapshot=None) -> SimResult:
    """Advance to t_end, recording the series every series_every steps and
    snapshots every snapshot_every steps (0 = initial and final only).

    A CFL violation aborts when cfl_check is on and only warns otherwise.
    Blow-up raises :class:`BlowUpError` with the partial result attached.
    """
    state = initial_state(cfg)
    rec = _Recorder(cfg)
    rec.record(state)
    snapshots = [(0, state)]
    if on_snapshot is not None:
        on_snapshot(0, state)

    def check_cfl(umax: float) -> None:
        bound = cfl_bound(cfg, umax)
        if cfg.dt > bound:
            msg = f"dt={cfg.dt:.3e} exceeds CFL bound {bound:.3e} (umax={umax:.3g})"
            if cfg.cfl_check:
                raise CflError(msg)
            logger.warning(msg)

    check_cfl(float(np.max(np.abs(state.u.values))))
    n_steps = cfg.n_steps()
    for n in range(1, n_steps + 1):
        try:
            state = strang_step(state, cfg)
        except SolverError as exc:
            series = rec.build()
            raise BlowUpError(
                f"step {n}: {exc}", step=n,
                partial=SimResult(cfg, snapshots, series, state),
            ) from exc
        if not np.all(np.isfinite(state.u.values)):
            series = rec.build()
            raise BlowUpError(
                f"non-finite velocity at step {n}", step=n,
                partial=SimResult(cfg, snapshots, series, state),
            )
        if n % cfg.series_every == 0 or n == n_steps:
            rec.record(state)
            check_cfl(rec.rows[-1][4])
        if (cfg.snapshot_every and n % cfg.snapshot_every == 0) or n == n_steps:
            snapshots.append((n, state))
            if on_snapshot is not None:
                on_snapshot(n, state)
    return SimResult(cfg, snapshots, rec.build(), state)
