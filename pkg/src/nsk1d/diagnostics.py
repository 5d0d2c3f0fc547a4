"""Measured quantities: interface position/velocity, mass flux, tangent-line
match of the modified energy, and the periodic stationarity identity.

The stationarity identity integrates an exact x-derivative over the torus
(telescopes to zero for every periodic field) next to the viscous
dissipation integral; a stationary viscous state with nonzero mass flux
forces the dissipation to vanish, i.e. constant density.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, fields

import numpy as np
from scipy.optimize import brentq

from . import _kernels as K
from .energy import EnergyModel
from .hermite import HermiteField

__all__ = [
    "DiagnosticSeries",
    "BitangencyReport",
    "interface_position",
    "interface_velocity",
    "smooth5",
    "mass_flux",
    "flux_stats",
    "bitangency_check",
    "stationarity_identity",
]


def interface_position(
    rho: HermiteField, level: float = 1.5, prev: float | None = None
) -> float | None:
    """Leftmost upcrossing of the mid-density level (or the one nearest prev).

    Located on the Hermite interpolant of the bracketing cell to 1e-12.
    Returns None when the state has no upcrossing (single phase).
    """
    v = rho.values
    nx = rho.grid.nx
    h = rho.grid.h
    f = v - level
    candidates = []
    for j in range(nx):
        jp = (j + 1) % nx
        if f[j] == 0.0:
            if rho.eval(j * h)[1] > 0.0:
                candidates.append(j * h)
        elif f[j] < 0.0 < f[jp]:
            a, b = j * h, (j + 1) * h
            root = brentq(lambda x: rho.eval(x)[0] - level, a, b, xtol=1e-14)
            val, der = rho.eval(root)
            if der != 0.0:  # one Newton polish on the interpolant
                root2 = root - (val - level) / der
                if a <= root2 <= b:
                    root = root2
            candidates.append(root)
    if not candidates:
        return None
    if prev is None:
        return float(min(candidates))
    prev_wrapped = prev - np.floor(prev)
    dist = [min(abs(c - prev_wrapped), 1.0 - abs(c - prev_wrapped)) for c in candidates]
    return float(candidates[int(np.argmin(dist))])


def interface_velocity(t: np.ndarray, xbar: np.ndarray) -> np.ndarray:
    """d(xbar)/dt by centered differences on unwrapped positions."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(xbar, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least 3 samples")
    c = np.empty_like(x)
    c[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    c[0] = (x[1] - x[0]) / (t[1] - t[0])
    c[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    return c


def smooth5(a: np.ndarray) -> np.ndarray:
    """5-point moving average with shrinking windows at the ends."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    n = len(a)
    for i in range(n):
        lo, hi = max(0, i - 2), min(n, i + 3)
        out[i] = np.mean(a[lo:hi])
    return out


def mass_flux(rho_values: np.ndarray, u_values: np.ndarray, c: float) -> np.ndarray:
    """Pointwise mass flux rho (u - c) at the nodes."""
    return np.asarray(rho_values) * (np.asarray(u_values) - c)


def flux_stats(rho_values, u_values, c: float) -> dict:
    flux = mass_flux(rho_values, u_values, c)
    return {
        "mean": float(np.mean(flux)),
        "std": float(np.std(flux)),
        "min": float(np.min(flux)),
        "max": float(np.max(flux)),
    }


@dataclass(frozen=True)
class BitangencyReport:
    """Tangent lines of psi_m at the extreme densities of a state."""

    m_est: float
    rho_min: float
    rho_max: float
    slope_g: float
    intercept_g: float
    slope_l: float
    intercept_l: float

    @property
    def slope_diff(self) -> float:
        return self.slope_l - self.slope_g

    @property
    def intercept_diff(self) -> float:
        return self.intercept_l - self.intercept_g

    def to_text(self) -> str:
        buf = io.StringIO()
        for f in fields(self):
            buf.write(f"{f.name} = {getattr(self, f.name):.17g}\n")
        buf.write(f"slope_diff = {self.slope_diff:.17g}\n")
        buf.write(f"intercept_diff = {self.intercept_diff:.17g}\n")
        return buf.getvalue()


def bitangency_check(rho_values, model: EnergyModel, m_est: float) -> BitangencyReport:
    """Tangent lines of the m_est-modified energy at the density extremes.

    For a traveling-wave state of the inviscid system the two lines coincide
    (they form the bitangent); the slope/intercept differences measure how
    far the state is from that structure.
    """
    rho_values = np.asarray(rho_values)
    r_min = float(np.min(rho_values))
    r_max = float(np.max(rho_values))
    mod = model.with_m(m_est)
    s_g = float(mod.dpsi_m(r_min))
    s_l = float(mod.dpsi_m(r_max))
    return BitangencyReport(
        m_est=m_est,
        rho_min=r_min,
        rho_max=r_max,
        slope_g=s_g,
        intercept_g=float(mod.psi_m(r_min)) - s_g * r_min,
        slope_l=s_l,
        intercept_l=float(mod.psi_m(r_max)) - s_l * r_max,
    )


def stationarity_identity(
    rho: HermiteField, m: float, mu_bar: float, eps: float, model: EnergyModel
) -> tuple[float, float]:
    """Evaluate the two integrals of the periodic stationarity decomposition.

    Returns ``(boundary, dissipation)`` where boundary is the integral over
    one period of the exact x-derivative

        d/dx { m^2 v^2 / 2 + Psi'(rho) - v mu_bar v_x - eps rho_xx },

    (zero to quadrature accuracy for any periodic field, v = 1/rho) and
    dissipation is ``int mu_bar |v_x|^2 dx``.  A stationary state with
    mu_bar > 0 and m != 0 forces the dissipation to vanish.
    """
    r = rho.values
    if np.any(r <= 0.0):
        raise ValueError("density must be positive")
    rx = rho.derivs
    h = rho.grid.h
    d2r = K.d2_array(r, rx, h)
    d3r = K.d3_array(r, rx, h)
    v = 1.0 / r
    vx = -rx * v * v
    vxx = -d2r * v * v + 2.0 * rx * rx * v * v * v
    integrand = (
        m * m * v * vx
        + model.d2psi(r) * rx
        - mu_bar * (vx * vx + v * vxx)
        - eps * d3r
    )
    boundary = float(np.sum(integrand)) * h
    dissipation = float(np.sum(mu_bar * vx * vx)) * h
    return boundary, dissipation


@dataclass
class DiagnosticSeries:
    """Per-record time series of the conserved and interface quantities."""

    t: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    xbar: np.ndarray
    c_interface: np.ndarray
    flux_mean: np.ndarray
    flux_std: np.ndarray
    umax: np.ndarray
    rhomin: np.ndarray
    rhomax: np.ndarray

    COLUMNS = (
        "t",
        "mass",
        "energy",
        "xbar",
        "c_interface",
        "flux_mean",
        "flux_std",
        "umax",
        "rhomin",
        "rhomax",
    )

    def __len__(self) -> int:
        return len(self.t)

    def smoothed_c(self) -> np.ndarray:
        return smooth5(self.c_interface)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(self.COLUMNS) + "\n")
            cols = [getattr(self, c) for c in self.COLUMNS]
            for row in zip(*cols):
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "DiagnosticSeries":
        data = np.genfromtxt(path, delimiter=",", names=True)
        return cls(**{c: np.atleast_1d(data[c]) for c in cls.COLUMNS})
