"""Periodic grid, value+derivative (Hermite) fields, and nodal stencils.

A :class:`HermiteField` stores nodal values and first derivatives of a
1-periodic function; the induced piecewise cubic is C^1 across nodes.  The
D2/D3/D4 stencils combine both data streams of the two nearest neighbor
rings and are exact on polynomials up to degree 4 (certified by
:func:`stencil_exactness`; the as-printed fourth-derivative variant is kept
for comparison and fails the gate).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import _kernels as K

__all__ = [
    "PeriodicGrid",
    "HermiteField",
    "STENCILS",
    "stencil_order",
    "stencil_exactness",
    "verify_stencils",
    "field_to_csv",
    "field_from_csv",
]


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid of nx cells on the unit torus; nodes x_j = j / nx."""

    nx: int

    def __post_init__(self):
        if self.nx < 8:
            raise ValueError("need at least 8 cells")

    @property
    def h(self) -> float:
        return 1.0 / self.nx

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx


@dataclass(frozen=True)
class HermiteField:
    """Nodal values and first derivatives on a periodic grid."""

    grid: PeriodicGrid
    values: np.ndarray
    derivs: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.grid.nx or len(self.derivs) != self.grid.nx:
            raise ValueError("array lengths must match the grid")

    @classmethod
    def from_callable(cls, grid: PeriodicGrid, f: Callable, df: Callable) -> "HermiteField":
        x = grid.nodes
        return cls(grid, np.asarray(f(x), dtype=float), np.asarray(df(x), dtype=float))

    @classmethod
    def constant(cls, grid: PeriodicGrid, value: float) -> "HermiteField":
        return cls(grid, np.full(grid.nx, float(value)), np.zeros(grid.nx))

    def eval(self, x):
        """Interpolant value and derivative at x (scalar or array, wrapped to [0,1))."""
        return K.interp_eval(self.values, self.derivs, self.grid.h, x)

    def __call__(self, x):
        return self.eval(x)[0]

    def integral(self) -> float:
        """Exact integral of the piecewise cubic over one period.

        The derivative contributions telescope on the torus, leaving the
        nodal mean.
        """
        return float(np.sum(self.values)) * self.grid.h

    def d2(self, j: int | None = None):
        out = K.d2_array(self.values, self.derivs, self.grid.h)
        return out if j is None else float(out[j])

    def d3(self, j: int | None = None):
        out = K.d3_array(self.values, self.derivs, self.grid.h)
        return out if j is None else float(out[j])

    def d4(self, j: int | None = None):
        out = K.d4_array(self.values, self.derivs, self.grid.h)
        return out if j is None else float(out[j])


#: stencil registry: name -> (kernel, derivative order)
STENCILS = {
    "d2": (K.d2_array, 2),
    "d3": (K.d3_array, 3),
    "d4": (K.d4_array, 4),
    "d4_printed": (K.d4_printed_array, 4),
}


def stencil_order(name: str) -> int:
    return STENCILS[name][1]


def _falling(p: int, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= p - i
    return out


def stencil_exactness(name: str, max_degree: int = 6, nx: int = 16) -> dict:
    """Apply a stencil to exact Hermite samples of monomials x^p on a
    non-wrapping window and report per-degree relative errors.

    The probe node sits mid-domain so its neighbor ring never crosses the
    periodic seam, making the global monomial locally polynomial data.
    Certified degree is the largest p such that all q <= p pass at 1e-10.
    """
    kernel, order = STENCILS[name]
    grid = PeriodicGrid(nx)
    j = nx // 2
    x = grid.nodes
    errors = []
    for p in range(max_degree + 1):
        values = x ** p
        derivs = p * x ** (p - 1) if p > 0 else np.zeros(nx)
        num = kernel(values, derivs, grid.h)[j]
        exact = _falling(p, order) * x[j] ** (p - order) if p >= order else 0.0
        errors.append(abs(num - exact) / max(1.0, abs(exact)))
    certified = -1
    for p, e in enumerate(errors):
        if e <= 1e-10:
            certified = p
        else:
            break
    return {"name": name, "errors": errors, "certified_degree": certified}


def verify_stencils() -> dict:
    """Gate used at test time: d2/d3/d4 must certify degree >= 4."""
    reports = {name: stencil_exactness(name) for name in ("d2", "d3", "d4")}
    bad = [n for n, r in reports.items() if r["certified_degree"] < 4]
    if bad:
        raise AssertionError(f"stencil exactness gate failed for {bad}: {reports}")
    return reports


def field_to_csv(field: HermiteField, path) -> None:
    """Write columns x, v, v_x at full (17 significant digit) precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "v", "v_x"])
        for x, v, d in zip(field.grid.nodes, field.values, field.derivs):
            w.writerow([f"{x:.17g}", f"{v:.17g}", f"{d:.17g}"])


def field_from_csv(path) -> HermiteField:
    data = np.genfromtxt(path, delimiter=",", names=True)
    nx = len(data["x"])
    return HermiteField(PeriodicGrid(nx), np.asarray(data["v"]), np.asarray(data["v_x"]))
