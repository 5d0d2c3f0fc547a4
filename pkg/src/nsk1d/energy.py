"""Thermodynamic model of the two-phase fluid.

Available energy Psi(rho), its momentum-modified variant
``psi_m = Psi - m^2/(2 rho)``, the pressure ``p = rho Psi' - Psi``, the
common-tangent (bitangent) construction and the induced double-well
potential W, and the energy-per-interface constant
``sigma = int sqrt(2 W)`` in density coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "EnergyModel",
    "Bitangent",
    "DoubleWell",
    "NoBitangentError",
    "quartic_model",
    "bitangent",
    "surface_energy",
]


class NoBitangentError(RuntimeError):
    """The modified energy has lost its double-well structure for this m."""


def _quartic(rho):
    return 0.25 * (rho - 1.0) ** 2 * (rho - 2.0) ** 2


def _quartic_d1(rho):
    return 0.5 * (rho - 1.0) * (rho - 2.0) * (2.0 * rho - 3.0)


def _quartic_d2(rho):
    return (3.0 * rho - 9.0) * rho + 6.5


def _quartic_d3(rho):
    return 6.0 * rho - 9.0


def _check_positive(rho) -> None:
    if np.any(np.asarray(rho) <= 0.0):
        raise ValueError("density must be positive")


@dataclass(frozen=True)
class EnergyModel:
    """Available energy Psi with analytic derivatives and moving-frame momentum m.

    The default is the quartic ``Psi(rho) = (rho-1)^2 (rho-2)^2 / 4`` whose
    wells sit at densities 1 (vapor) and 2 (liquid).  All callables must be
    vectorized over numpy arrays.
    """

    psi: Callable = field(default=_quartic)
    dpsi: Callable = field(default=_quartic_d1)
    d2psi: Callable = field(default=_quartic_d2)
    d3psi: Callable | None = field(default=_quartic_d3)
    m: float = 0.0

    def with_m(self, m: float) -> "EnergyModel":
        return EnergyModel(self.psi, self.dpsi, self.d2psi, self.d3psi, m)

    # third derivative is needed by the u_x source update; fall back to a
    # central difference of d2psi for user models that do not supply it
    def d3psi_or_fd(self, rho):
        if self.d3psi is not None:
            return self.d3psi(rho)
        h = 1e-5
        return (self.d2psi(rho + h) - self.d2psi(rho - h)) / (2.0 * h)

    # -- modified energy -------------------------------------------------
    def psi_m(self, rho):
        _check_positive(rho)
        return self.psi(rho) - 0.5 * self.m * self.m / rho

    def dpsi_m(self, rho):
        _check_positive(rho)
        return self.dpsi(rho) + 0.5 * self.m * self.m / (rho * rho)

    def d2psi_m(self, rho):
        _check_positive(rho)
        return self.d2psi(rho) - self.m * self.m / (rho * rho * rho)

    # -- pressure ----------------------------------------------------------
    def pressure(self, rho):
        _check_positive(rho)
        return rho * self.dpsi(rho) - self.psi(rho)

    def dpressure(self, rho):
        _check_positive(rho)
        return rho * self.d2psi(rho)


def quartic_model(m: float = 0.0) -> EnergyModel:
    return EnergyModel(m=m)


@dataclass(frozen=True)
class Bitangent:
    """The common tangent line of psi_m: tangency densities and line."""

    rho_g: float
    rho_l: float
    slope: float
    intercept: float

    @property
    def width(self) -> float:
        return self.rho_l - self.rho_g

    @property
    def rho_mid(self) -> float:
        return 0.5 * (self.rho_g + self.rho_l)

    def line(self, rho):
        return self.slope * rho + self.intercept


def bitangent(model: EnergyModel, tol: float = 1e-12, max_iter: int = 100) -> Bitangent:
    """Solve dpsi_m(a) = dpsi_m(b) = (psi_m(b)-psi_m(a))/(b-a) by damped Newton.

    Seeded from the m = 0 wells (1, 2).  Raises :class:`NoBitangentError`
    when the iteration fails or the double-well structure is lost.
    """
    f, df, d2f = model.psi_m, model.dpsi_m, model.d2psi_m
    a, b = 1.0, 2.0

    def residual(a, b):
        s = (f(b) - f(a)) / (b - a)
        return np.array([df(a) - s, df(b) - s]), s

    F, s = residual(a, b)
    for _ in range(max_iter):
        if max(abs(F[0]), abs(F[1])) <= tol:
            break
        ds_da = (s - df(a)) / (b - a)
        ds_db = (df(b) - s) / (b - a)
        J = np.array([[d2f(a) - ds_da, -ds_db], [-ds_da, d2f(b) - ds_db]])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise NoBitangentError(f"singular Newton system at m={model.m}") from exc
        # damping by step halving until the residual shrinks
        lam, best = 1.0, None
        for _ in range(60):
            a_t, b_t = a - lam * step[0], b - lam * step[1]
            if a_t > 0.0 and b_t - a_t > 1e-8:
                F_t, s_t = residual(a_t, b_t)
                if np.max(np.abs(F_t)) < np.max(np.abs(F)):
                    best = (a_t, b_t, F_t, s_t)
                    break
            lam *= 0.5
        if best is None:
            raise NoBitangentError(
                f"Newton stalled at m={model.m}: residual {np.max(np.abs(F)):.3e}"
            )
        a, b, F, s = best
    else:
        raise NoBitangentError(
            f"no bitangent after {max_iter} iterations at m={model.m}"
        )

    if not (b - a > 1e-6 and d2f(a) > 0.0 and d2f(b) > 0.0):
        raise NoBitangentError(f"double-well structure lost at m={model.m}")
    slope = float(df(a))
    return Bitangent(float(a), float(b), slope, float(f(a) - slope * a))


class DoubleWell:
    """W = psi_m - bitangent line on the physical window, extended outside.

    The physical window is ``[rho_g - delta, rho_l + delta]`` with
    ``delta = margin * (rho_l - rho_g)``.  Outside, W continues as the
    second-order Taylor polynomial of the junction plus a quartic term, which
    keeps the extension C^2 and coercive (``W >= c0 (rho - rho_mid)^2 - c1``).
    """

    def __init__(self, model: EnergyModel, bit: Bitangent, margin: float = 0.1):
        self.model = model
        self.bit = bit
        delta = margin * bit.width
        self.lo = bit.rho_g - delta
        self.hi = bit.rho_l + delta
        self._taylor = {}
        for j in (self.lo, self.hi):
            self._taylor[j] = (
                float(model.psi_m(j) - bit.line(j)),
                float(model.dpsi_m(j) - bit.slope),
                float(model.d2psi_m(j)),
            )

    def _ext(self, rho, j, order):
        w0, w1, w2 = self._taylor[j]
        d = rho - j
        if order == 0:
            return w0 + d * (w1 + 0.5 * w2 * d) + d ** 4
        if order == 1:
            return w1 + w2 * d + 4.0 * d ** 3
        return w2 + 12.0 * d * d

    def _eval(self, rho, order):
        rho = np.asarray(rho, dtype=float)
        scalar = rho.ndim == 0
        rho = np.atleast_1d(rho)
        out = np.empty_like(rho)
        inside = (rho >= self.lo) & (rho <= self.hi)
        if np.any(inside):
            r = rho[inside]
            if order == 0:
                out[inside] = self.model.psi_m(r) - self.bit.line(r)
            elif order == 1:
                out[inside] = self.model.dpsi_m(r) - self.bit.slope
            else:
                out[inside] = self.model.d2psi_m(r)
        for mask, j in ((rho < self.lo, self.lo), (rho > self.hi, self.hi)):
            if np.any(mask):
                out[mask] = self._ext(rho[mask], j, order)
        return float(out[0]) if scalar else out

    def __call__(self, rho):
        return self._eval(rho, 0)

    def d(self, rho):
        return self._eval(rho, 1)

    def d2(self, rho):
        return self._eval(rho, 2)

    def hump(self) -> float:
        """Interior critical point of W between the wells (assumed unique)."""
        from scipy.optimize import brentq

        g, l = self.bit.rho_g, self.bit.rho_l
        grid = np.linspace(g + 1e-4 * self.bit.width, l - 1e-4 * self.bit.width, 257)
        dw = self.d(grid)
        k = int(np.argmax(self(grid)))
        # bracket the sign change of W' around the maximum of W
        for i in range(max(k - 1, 0), 0, -1):
            if dw[i] > 0.0:
                lo = grid[i]
                break
        else:
            lo = grid[0]
        for i in range(min(k + 1, len(grid) - 1), len(grid)):
            if dw[i] < 0.0:
                hi = grid[i]
                break
        else:
            hi = grid[-1]
        return float(brentq(self.d, lo, hi, xtol=1e-14))


def _adaptive_gl(f, a: float, b: float, tol: float, depth: int = 48):
    """Composite 10-point Gauss-Legendre with interval halving."""
    nodes, weights = np.polynomial.legendre.leggauss(10)

    def panel(lo, hi):
        mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return rad * float(np.dot(weights, f(mid + rad * nodes)))

    def recurse(lo, hi, whole, tol, depth):
        mid = 0.5 * (lo + hi)
        left, right = panel(lo, mid), panel(mid, hi)
        if abs(left + right - whole) <= tol or depth == 0:
            return left + right
        return recurse(lo, mid, left, 0.5 * tol, depth - 1) + recurse(
            mid, hi, right, 0.5 * tol, depth - 1
        )

    return recurse(a, b, panel(a, b), tol, depth)


def surface_energy(model: EnergyModel, bit: Bitangent, tol: float = 1e-10) -> float:
    """sigma in density coordinates: integral of sqrt(2 W) over [rho_g, rho_l].

    The integrand vanishes like a square root at both endpoints; adaptive
    halving of the Gauss-Legendre panels resolves it to the requested
    tolerance.  Roundoff can make W infinitesimally negative at the wells,
    hence the clip.
    """
    W = DoubleWell(model, bit)

    def integrand(rho):
        return np.sqrt(np.maximum(2.0 * W(rho), 0.0))

    return float(_adaptive_gl(integrand, bit.rho_g, bit.rho_l, tol))
