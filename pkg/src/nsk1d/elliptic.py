"""Jacobi elliptic machinery and the exact cnoidal reference solution.

K(k) and sn(u,k) are evaluated by arithmetic-geometric-mean iteration
(descending Landen).  The cnoidal density profile

    rho(x) = 3/2 + A sn(4 K(k) x, k),   A = k / sqrt(2 (1 + k^2))

is a stationary Euler-Korteweg state when eps = 1 / (64 (1+k^2) K(k)^2);
advected with a constant velocity it is the solver's ground-truth oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EPS_MAX",
    "elliptic_k",
    "jacobi_sn",
    "jacobi_sn_cn_dn",
    "CnoidalWave",
]

#: upper bound of the admissible Korteweg parameter (the k -> 0 limit)
EPS_MAX = 1.0 / (16.0 * math.pi ** 2)

_AGM_TOL = 4e-16


def _agm_k(kc: float) -> float:
    """K from the complementary modulus: K = pi / (2 AGM(1, kc))."""
    a, b = 1.0, kc
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind, 0 <= k < 1."""
    if not 0.0 <= k < 1.0:
        raise ValueError(f"modulus must satisfy 0 <= k < 1, got {k}")
    return _agm_k(math.sqrt((1.0 - k) * (1.0 + k)))


def _sn_cn_dn_reduced(u: float, k: float, kc: float) -> tuple[float, float, float]:
    """AGM evaluation, caller guarantees |u| <= K(k)."""
    a = [1.0]
    b = kc
    c = [k]
    while abs(c[-1]) > _AGM_TOL * a[-1] and len(a) < 64:
        a_next = 0.5 * (a[-1] + b)
        b_next = math.sqrt(a[-1] * b)
        c.append(0.5 * (a[-1] - b))
        a.append(a_next)
        b = b_next
    n = len(a) - 1
    phi = (2.0 ** n) * a[n] * u
    phi_prev = phi
    for i in range(n, 0, -1):
        phi_prev = phi
        s = min(1.0, max(-1.0, c[i] / a[i] * math.sin(phi)))
        phi = 0.5 * (phi + math.asin(s))
    sn, cn = math.sin(phi), math.cos(phi)
    denom = math.cos(phi_prev - phi)
    dn = cn / denom if abs(denom) > 1e-300 else 0.0
    return sn, cn, dn


def _sn_cn_dn_scalar(u: float, k: float, kc: float, big_k: float):
    if k < 1e-14:
        return math.sin(u), math.cos(u), 1.0
    if kc < 1e-12:  # k = 1 limit: sn -> tanh
        t = math.tanh(u)
        s = 1.0 / math.cosh(u)
        return t, s, s
    # reduce modulo the 4K period, then into [-K, K] with the
    # half-period identities sn(2K - u) = sn(u), cn(2K - u) = -cn(u),
    # dn(2K - u) = dn(u)
    r = u - 4.0 * big_k * math.floor(u / (4.0 * big_k) + 0.5)
    if r > big_k:
        sn, cn, dn = _sn_cn_dn_reduced(2.0 * big_k - r, k, kc)
        return sn, -cn, dn
    if r < -big_k:
        sn, cn, dn = _sn_cn_dn_reduced(2.0 * big_k + r, k, kc)
        return -sn, -cn, dn
    return _sn_cn_dn_reduced(r, k, kc)


def jacobi_sn_cn_dn(u, k: float, kc: float | None = None):
    """sn, cn, dn for scalar or array u at fixed modulus k in [0, 1]."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"modulus must satisfy 0 <= k <= 1, got {k}")
    if kc is None:
        kc = math.sqrt((1.0 - k) * (1.0 + k))
    big_k = _agm_k(kc) if kc > 0.0 else math.inf
    u_arr = np.asarray(u, dtype=float)
    if u_arr.ndim == 0:
        return _sn_cn_dn_scalar(float(u_arr), k, kc, big_k)
    out = np.empty((3,) + u_arr.shape)
    flat = u_arr.ravel()
    for i, ui in enumerate(flat):
        vals = _sn_cn_dn_scalar(float(ui), k, kc, big_k)
        out[0].ravel()[i], out[1].ravel()[i], out[2].ravel()[i] = vals
    return out[0], out[1], out[2]


def jacobi_sn(u, k: float):
    """Jacobi sn, 4K-periodic and odd in u."""
    return jacobi_sn_cn_dn(u, k)[0]


@dataclass(frozen=True)
class CnoidalWave:
    """Parameters of the exact cnoidal profile of period 1.

    ``kc`` is the complementary modulus kept alongside k: for the Korteweg
    parameters of interest k is within 1e-7 of 1 and recomputing
    sqrt(1 - k^2) from the rounded k would destroy the eps round trip.
    """

    k: float
    kc: float
    eps: float
    amplitude: float
    wavenumber: float  # 4 K(k); the sn argument is wavenumber * x

    @classmethod
    def from_k(cls, k: float, kc: float | None = None) -> "CnoidalWave":
        if not 0.0 < k < 1.0:
            raise ValueError(f"modulus must be inside (0, 1), got {k}")
        if kc is None:
            kc = math.sqrt((1.0 - k) * (1.0 + k))
        big_k = _agm_k(kc)
        eps = 1.0 / (64.0 * (1.0 + k * k) * big_k * big_k)
        amp = 0.5 * math.sqrt(2.0 * k * k / (1.0 + k * k))
        return cls(k, kc, eps, amp, 4.0 * big_k)

    @classmethod
    def from_eps(cls, eps: float) -> "CnoidalWave":
        """Invert eps = 1/(64 (1+k^2) K(k)^2), solving in kc to keep accuracy."""
        if not 0.0 < eps < EPS_MAX:
            raise ValueError(
                f"no cnoidal wave at eps={eps}: admissible range is (0, {EPS_MAX:.7g})"
            )

        def f(kc):
            big_k = _agm_k(kc)
            k2 = (1.0 - kc) * (1.0 + kc)
            return 64.0 * (1.0 + k2) * big_k * big_k * eps - 1.0

        lo, hi = 5e-324, 1.0 - 1e-16
        flo, fhi = f(lo), f(hi)
        if not (fhi < 0.0 < flo):  # f decreasing in kc
            raise ValueError(f"no cnoidal wave at eps={eps}")
        for _ in range(200):
            mid = 0.5 * (lo + hi) if hi - lo < 0.5 * hi else math.sqrt(lo * hi)
            fm = f(mid)
            if fm > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-18 * hi:
                break
        kc = 0.5 * (lo + hi)
        k = math.sqrt((1.0 - kc) * (1.0 + kc))
        return cls.from_k(k, kc)

    def residual(self) -> float:
        """Round-trip defect of the eps-k relation for these parameters."""
        big_k = 0.25 * self.wavenumber
        return 64.0 * (1.0 + self.k ** 2) * big_k ** 2 * self.eps - 1.0

    def _sn_cn_dn(self, x):
        return jacobi_sn_cn_dn(self.wavenumber * np.asarray(x, dtype=float), self.k, self.kc)

    def rho(self, x):
        sn, _, _ = self._sn_cn_dn(x)
        return 1.5 + self.amplitude * sn

    def drho(self, x):
        sn, cn, dn = self._sn_cn_dn(x)
        return self.amplitude * self.wavenumber * cn * dn

    def d2rho(self, x):
        sn, _, _ = self._sn_cn_dn(x)
        k2 = self.k * self.k
        return (
            self.amplitude
            * self.wavenumber ** 2
            * (2.0 * k2 * sn ** 3 - (1.0 + k2) * sn)
        )

    def state(self, x, t: float = 0.0, ubar: float = 0.0):
        """Exact solution (rho, u) = (rho0(x - ubar t), ubar) of the IVP."""
        xs = np.asarray(x, dtype=float) - ubar * t
        return self.rho(xs), np.full_like(np.asarray(xs, dtype=float), ubar)

    def rho_printed_variant(self, x):
        """The sn(4K x / pi) variant as printed; has period pi, kept for comparison."""
        sn, _, _ = jacobi_sn_cn_dn(
            self.wavenumber / math.pi * np.asarray(x, dtype=float), self.k, self.kc
        )
        return 1.5 + self.amplitude * sn
