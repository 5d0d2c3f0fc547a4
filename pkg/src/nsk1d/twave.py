"""Periodic and heteroclinic traveling-wave construction.

Three routes to the same waves, used to cross-validate each other:

* constrained minimization of the relaxed double-well energy
  ``E = int( eps |rho'|^2 / 2 + W(rho) ) dx`` under an average constraint
  (projected gradient descent with Barzilai-Borwein steps);
* phase-plane periodic orbits of ``eps rho'' = W'(rho) + lambda`` solved by
  quadrature of the conserved level set, Newton-matched to a prescribed
  period and average;
* the monotone kink connecting the two phase densities (lambda = 0).

All computations run in density coordinates.  The orbit quadratures are
parametrized by the turning-point offsets from the wells: the integrable
square-root endpoint singularity is absorbed by a cosh substitution which
also resolves the logarithmic boundary layer of near-separatrix orbits, so
periods of many interface widths stay well conditioned.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

from .energy import Bitangent, DoubleWell, EnergyModel, bitangent

__all__ = [
    "WaveProfile",
    "OrbitParams",
    "TravelingWave",
    "TwaveError",
    "minimize_periodic",
    "orbit_period_and_average",
    "solve_periodic_orbit",
    "lambda_decay",
    "kink_profile",
    "kink_limit_check",
    "galilean_assemble",
    "modica_mortola_check",
    "profile_to_csv",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)

#: below this offset from a well the double well is evaluated by its local
#: Taylor expansion; direct evaluation would cancel catastrophically
_TAYLOR_Y = 1e-8


class TwaveError(RuntimeError):
    pass


@dataclass
class WaveProfile:
    """One period (or a line window) of a traveling-wave density profile."""

    x: np.ndarray
    rho: np.ndarray
    omega: float          # period; math.inf for the kink
    lam: float            # Euler-Lagrange constant of the average constraint
    m: float              # moving-frame momentum of the underlying model
    average: float
    c: float | None = None
    meta: dict = dc_field(default_factory=dict)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.x, self.rho])

    def eval(self, x):
        """Periodic (or clamped, for the kink) interpolation of the samples."""
        if math.isinf(self.omega):
            interp = PchipInterpolator(self.x, self.rho, extrapolate=False)
            out = interp(np.asarray(x, dtype=float))
            out = np.where(np.asarray(x) < self.x[0], self.rho[0], out)
            out = np.where(np.asarray(x) > self.x[-1], self.rho[-1], out)
            return out
        xw = np.mod(np.asarray(x, dtype=float), self.omega)
        pad = 8
        xs = np.concatenate(
            [self.x[-pad:] - self.omega, self.x, self.x[:pad] + self.omega]
        )
        rs = np.concatenate([self.rho[-pad:], self.rho, self.rho[:pad]])
        return PchipInterpolator(xs, rs)(xw)

    def upcrossing(self, level: float) -> float:
        """Leftmost upcrossing position of the given density level."""
        f = self.rho - level
        n = len(f)
        for i in range(n):
            j = (i + 1) % n
            if f[i] == 0.0 and f[j] > 0.0:
                return float(self.x[i])
            if f[i] < 0.0 <= f[j]:
                a = self.x[i]
                b = self.x[j] if j > i else self.omega
                try:
                    return float(
                        brentq(lambda x: float(self.eval(x)) - level, a, b, xtol=1e-13)
                    )
                except ValueError:
                    return float(a)
        raise TwaveError("profile has no upcrossing of the requested level")


@dataclass(frozen=True)
class OrbitParams:
    """A level set of H(q, p) = eps p^2/2 - W(q) - lambda q."""

    H0: float
    lam: float
    turning_points: tuple[float, float] | None = None


@dataclass
class TravelingWave:
    """A wave profile assembled into the lab frame."""

    profile: WaveProfile
    c: float
    u: np.ndarray
    m: float
    phase_transition: bool

    def rho_at(self, x, t: float = 0.0):
        return self.profile.eval(np.asarray(x) - self.c * t)

    def u_at(self, x, t: float = 0.0):
        return self.c + self.m / self.rho_at(x, t) if self.m != 0.0 else np.full_like(
            np.asarray(x, dtype=float), self.c
        )


# ---------------------------------------------------------------------------
# orbit quadrature machinery
# ---------------------------------------------------------------------------


@dataclass
class _Side:
    well: float    # well density this side hugs
    d: float       # +1: vapor side (q = well + y); -1: liquid side (q = well - y)
    delta: float   # turning-point offset from the well
    Y: float       # outer offset where the middle region takes over
    W2: float      # W'' at the well
    W3: float      # W''' at the well


class _Orbit:
    """Geometry of one periodic orbit, parametrized by turning offsets."""

    def __init__(self, W: DoubleWell, bit: Bitangent, eps: float,
                 delta_g: float, delta_l: float, rho_star: float):
        self.W = W
        self.bit = bit
        self.eps = eps
        self.rho_star = rho_star
        g0, l0 = bit.rho_g, bit.rho_l
        self.q_minus = g0 + delta_g
        self.q_plus = l0 - delta_l
        if not (self.q_minus < rho_star < self.q_plus):
            raise TwaveError("turning points do not bracket the hump")
        w_minus = self._well_w(g0, +1.0, delta_g)
        w_plus = self._well_w(l0, -1.0, delta_l)
        # chord slope through the turning points; lam = -slope makes both
        # g(q -/+) vanish exactly
        self.s = (w_plus - w_minus) / (self.q_plus - self.q_minus)
        self.lam = -self.s
        self.H0 = -w_minus + self.s * self.q_minus
        self.w_minus = w_minus
        d3 = W.model.d3psi_or_fd
        self.sides = (
            _Side(g0, +1.0, delta_g, 0.5 * (rho_star - self.q_minus) + delta_g,
                  float(W.d2(g0)), float(d3(g0))),
            _Side(l0, -1.0, delta_l, 0.5 * (self.q_plus - rho_star) + delta_l,
                  float(W.d2(l0)), float(d3(l0))),
        )
        self.qa = g0 + self.sides[0].Y
        self.qb = l0 - self.sides[1].Y

    def _well_w(self, well: float, d: float, y: float):
        """W at well + d*y, by Taylor when the offset underflows direct evaluation."""
        if y < _TAYLOR_Y:
            side_w2 = float(self.W.d2(well))
            side_w3 = float(self.W.model.d3psi_or_fd(well))
            return 0.5 * side_w2 * y * y + d * side_w3 * y ** 3 / 6.0
        return float(self.W(well + d * y))

    def g_mid(self, q):
        """Chord form of the level function; exact zeros at the turning points."""
        return self.W(q) - self.w_minus - self.s * (q - self.q_minus)

    def _gtilde(self, side: _Side, y):
        """g / (y - delta) on one side, stable down to y ~ delta ~ 1e-300.

        Divided difference of W between well offsets y and delta; switches to
        the local Taylor form below the cancellation threshold.
        """
        y = np.asarray(y, dtype=float)
        small = y < _TAYLOR_Y
        out = np.empty_like(y)
        d, delta = side.d, side.delta
        if np.any(small):
            ys = y[small]
            out[small] = (
                0.5 * side.W2 * (ys + delta)
                + d * side.W3 / 6.0 * (ys * ys + ys * delta + delta * delta)
                - self.s * d
            )
        if np.any(~small):
            yb = y[~small]
            w_y = self.W(side.well + d * yb)
            w_t = self._well_w(side.well, d, delta)
            out[~small] = (w_y - w_t) / (yb - delta) - self.s * d
        return out

    def _side_panels(self, side: _Side, per_unit: int = 1):
        t_max = math.log(side.Y / side.delta + math.sqrt((side.Y / side.delta) ** 2 - 1.0)) \
            if side.Y / side.delta > 1e8 else math.acosh(side.Y / side.delta)
        n_panels = max(4, int(math.ceil(t_max * per_unit)))
        edges = np.linspace(0.0, t_max, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        rad = 0.5 * (edges[1:] - edges[:-1])
        t = (mid[:, None] + rad[:, None] * _GL_NODES[None, :]).ravel()
        wts = (rad[:, None] * _GL_WEIGHTS[None, :]).ravel()
        return t, wts

    def _side_integrals(self, side: _Side):
        """(int dq/sqrt(g), int q dq/sqrt(g)) over the well region of one side."""
        t, wts = self._side_panels(side)
        y = side.delta * np.cosh(t)
        gt = self._gtilde(side, y)
        if np.any(gt <= 0.0):
            raise TwaveError("level function not positive inside the orbit")
        base = math.sqrt(2.0 * side.delta) * np.cosh(0.5 * t) / np.sqrt(gt)
        q = side.well + side.d * y
        return float(np.dot(wts, base)), float(np.dot(wts, base * q))

    def _mid_integrals(self, n_panels: int = 16):
        edges = np.linspace(self.qa, self.qb, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        rad = 0.5 * (edges[1:] - edges[:-1])
        q = (mid[:, None] + rad[:, None] * _GL_NODES[None, :]).ravel()
        wts = (rad[:, None] * _GL_WEIGHTS[None, :]).ravel()
        g = self.g_mid(q)
        if np.any(g <= 0.0):
            raise TwaveError("level function not positive in the middle region")
        base = 1.0 / np.sqrt(g)
        return float(np.dot(wts, base)), float(np.dot(wts, base * q))

    def integrals(self) -> tuple[float, float]:
        """Period T and orbit average of q.

        T = 2 * int sqrt(eps/2) dq / sqrt(g) over the ascending half period.
        """
        i0, i1 = self._mid_integrals()
        for side in self.sides:
            a0, a1 = self._side_integrals(side)
            i0 += a0
            i1 += a1
        scale = math.sqrt(2.0 * self.eps)
        T = scale * i0
        avg = i1 / i0
        return T, avg

    # -- profile reconstruction -------------------------------------------
    def _cumulative(self, q_nodes, x_weights_fn):
        """Cumulative arc length over consecutive node pairs via 8-pt GL."""
        a = q_nodes[:-1][:, None]
        b = q_nodes[1:][:, None]
        mid = 0.5 * (a + b)
        rad = 0.5 * (b - a)
        pts = mid + rad * _GL8_NODES[None, :]
        vals = x_weights_fn(pts)
        seg = (rad[:, 0]) * (vals @ _GL8_WEIGHTS)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def graph(self, per_unit_t: int = 24, n_mid: int = 801):
        """Dense (x, q) samples of the ascending half period, x(q_minus) = 0."""
        scale = math.sqrt(self.eps / 2.0)
        xs, qs = [0.0], [self.q_minus]

        def add_side(side: _Side):
            t_hi = math.acosh(side.Y / side.delta) if side.Y / side.delta < 1e8 else \
                math.log(2.0 * side.Y / side.delta)
            n = max(8, int(math.ceil(t_hi * per_unit_t)))
            t_edges = np.linspace(0.0, t_hi, n + 1)
            # dx = scale * sqrt(2 delta) cosh(t/2) / sqrt(Gtilde) dt
            a = t_edges[:-1][:, None]
            b = t_edges[1:][:, None]
            mid = 0.5 * (a + b)
            rad = 0.5 * (b - a)
            tp = mid + rad * _GL8_NODES[None, :]
            y = side.delta * np.cosh(tp)
            integ = scale * math.sqrt(2.0 * side.delta) * np.cosh(0.5 * tp) / np.sqrt(
                self._gtilde(side, y)
            )
            seg = rad[:, 0] * (integ @ _GL8_WEIGHTS)
            q_nodes = side.well + side.d * side.delta * np.cosh(t_edges)
            return q_nodes, seg

        # vapor side: q ascending from q_minus to qa
        q_nodes, seg = add_side(self.sides[0])
        x = xs[-1] + np.cumsum(seg)
        xs.extend(x.tolist())
        qs.extend(q_nodes[1:].tolist())

        # middle region on a Chebyshev-clustered grid
        theta = np.linspace(0.0, math.pi, n_mid)
        q_mid = 0.5 * (self.qa + self.qb) - 0.5 * (self.qb - self.qa) * np.cos(theta)
        q_mid[0], q_mid[-1] = self.qa, self.qb

        def mid_integrand(pts):
            return scale / np.sqrt(self.g_mid(pts))

        x_mid = self._cumulative(q_mid, mid_integrand)
        base = xs[-1]
        xs.extend((base + x_mid[1:]).tolist())
        qs.extend(q_mid[1:].tolist())

        # liquid side: q ascending from qb to q_plus means t descending
        q_nodes, seg = add_side(self.sides[1])
        base = xs[-1]
        x = base + np.cumsum(seg[::-1])
        xs.extend(x.tolist())
        qs.extend(q_nodes[::-1][1:].tolist())
        return np.asarray(xs), np.asarray(qs)


def _setup(model: EnergyModel):
    bit = bitangent(model)
    W = DoubleWell(model, bit)
    return bit, W, W.hump()


def orbit_period_and_average(
    model: EnergyModel, eps: float, params: OrbitParams
) -> tuple[float, float]:
    """Period and average density of the closed orbit at the given level."""
    bit, W, rho_star = _setup(model)
    if params.turning_points is not None:
        q_minus, q_plus = params.turning_points
    else:
        def g(q):
            return W(q) + params.lam * q + params.H0

        if g(rho_star) <= 0.0:
            raise TwaveError("no closed orbit: level function nonpositive at the hump")

        def march(direction: float) -> float:
            # nearest sign change of g walking away from the hump; the well
            # itself brackets levels that hug the separatrix
            well = bit.rho_l if direction > 0 else bit.rho_g
            if g(well) <= 0.0:
                lo, hi = (rho_star, well) if direction > 0 else (well, rho_star)
                return float(brentq(g, lo, hi, xtol=1e-15))
            limit = bit.rho_l + 0.2 * bit.width if direction > 0 else bit.rho_g - 0.2 * bit.width
            grid = np.linspace(rho_star, limit, 2001)
            vals = g(grid)
            idx = np.nonzero(vals <= 0.0)[0]
            if len(idx) == 0:
                raise TwaveError("no turning points at this level")
            i = idx[0]
            return float(brentq(g, grid[i - 1], grid[i], xtol=1e-15))

        q_minus = march(-1.0)
        q_plus = march(+1.0)
    orbit = _Orbit(W, bit, eps, q_minus - bit.rho_g, bit.rho_l - q_plus, rho_star)
    return orbit.integrals()


def _valid_seed(W, bit, delta0):
    """Grow turning offsets until the level function is positive at both
    turning points: the multiplier shifts the effective wells by ~ |s|/W''."""
    dg, dl = float(delta0[0]), float(delta0[1])
    w2g = float(W.d2(bit.rho_g))
    w2l = float(W.d2(bit.rho_l))
    for _ in range(200):
        w_minus = float(W(bit.rho_g + dg)) if dg >= _TAYLOR_Y else 0.5 * w2g * dg * dg
        w_plus = float(W(bit.rho_l - dl)) if dl >= _TAYLOR_Y else 0.5 * w2l * dl * dl
        s = (w_plus - w_minus) / ((bit.rho_l - dl) - (bit.rho_g + dg))
        ok = True
        if w2g * dg - s <= 0.0:
            dg = max(2.0 * dg, 1.1 * s / w2g)
            ok = False
        if w2l * dl + s <= 0.0:
            dl = max(2.0 * dl, 1.1 * (-s) / w2l)
            ok = False
        if ok:
            break
    return dg, dl


def _newton_orbit(W, bit, eps, omega, a, rho_star, delta0):
    """Damped Newton in log turning offsets matching (period, average)."""
    drho = bit.width
    delta0 = _valid_seed(W, bit, delta0)
    u = np.log(np.asarray(delta0, dtype=float))
    cap_g = math.log(0.95 * (rho_star - bit.rho_g))
    cap_l = math.log(0.95 * (bit.rho_l - rho_star))
    floor = math.log(1e-280)

    def clip(u):
        return np.array([min(max(u[0], floor), cap_g), min(max(u[1], floor), cap_l)])

    def F(u):
        orbit = _Orbit(W, bit, eps, math.exp(u[0]), math.exp(u[1]), rho_star)
        T, avg = orbit.integrals()
        return np.array([math.log(T / omega), (avg - a) / drho]), orbit

    u = clip(u)
    Fu, orbit = F(u)
    for _ in range(80):
        if np.max(np.abs(Fu)) < 1e-12:
            break
        J = np.empty((2, 2))
        step_fd = 1e-6
        for col in range(2):
            up = u.copy()
            up[col] += step_fd
            try:
                Fp, _ = F(clip(up))
            except TwaveError:
                up[col] -= 2.0 * step_fd
                Fp, _ = F(clip(up))
                Fp = 2.0 * Fu - Fp
            J[:, col] = (Fp - Fu) / step_fd
        try:
            delta_u = np.linalg.solve(J, Fu)
        except np.linalg.LinAlgError as exc:
            raise TwaveError("singular orbit Newton system") from exc
        norm = np.max(np.abs(delta_u))
        if norm > 6.0:
            delta_u *= 6.0 / norm
        lam_step = 1.0
        improved = False
        for _ in range(40):
            u_try = clip(u - lam_step * delta_u)
            try:
                F_try, orbit_try = F(u_try)
            except TwaveError:
                lam_step *= 0.5
                continue
            if np.max(np.abs(F_try)) < np.max(np.abs(Fu)):
                if np.array_equal(u_try, u):
                    improved = False
                    break
                u, Fu, orbit = u_try, F_try, orbit_try
                improved = True
                break
            lam_step *= 0.5
        if not improved:
            break  # step stalled at float resolution; accept current residual
    residual = float(np.max(np.abs(Fu)))
    if residual > 1e-5:
        raise TwaveError(
            f"orbit Newton did not converge (residual {residual:.3e}); "
            "try seeding from the energy minimizer"
        )
    return orbit, residual


def _newton_orbit_mp(model, bit, eps, omega, a, rho_star, delta0):
    """Extended-precision orbit Newton for extreme periods.

    For many-interface-width periods the dominated turning offset is pinned
    to the multiplier within ~1e-50, far below float resolution; mpmath
    absorbs the cancellations (the default quartic is plain Python
    arithmetic, so it evaluates at any precision).  Returns float offsets
    and the multiplier.
    """
    import mpmath as mp

    digits = int(min(160, 40 + 3 * abs(math.log10(max(min(delta0), 1e-40)))))
    slope = mp.mpf(bit.slope)
    intercept = mp.mpf(bit.intercept)
    m2 = mp.mpf(model.m) ** 2
    g0 = mp.mpf(bit.rho_g)
    l0 = mp.mpf(bit.rho_l)
    drho = l0 - g0

    def W(q):
        return model.psi(q) - m2 / (2 * q) - (slope * q + intercept)

    with mp.workdps(digits):
        qa = mp.mpf(0.5) * (g0 + mp.mpf(rho_star))
        qb = mp.mpf(0.5) * (l0 + mp.mpf(rho_star))

        def integrals(dg, dl):
            q_minus = g0 + dg
            q_plus = l0 - dl
            w_minus = W(q_minus)
            s = (W(q_plus) - w_minus) / (q_plus - q_minus)

            def g(q):
                return W(q) - w_minus - s * (q - q_minus)

            def f0(q):
                return 1 / mp.sqrt(g(q))

            def f1(q):
                return q / mp.sqrt(g(q))

            pts = [q_minus, qa, qb, q_plus]
            i0 = mp.quad(f0, pts)
            i1 = mp.quad(f1, pts)
            T = mp.sqrt(2 * mp.mpf(eps)) * i0
            return T, i1 / i0, -s

        u = [mp.log(mp.mpf(delta0[0])), mp.log(mp.mpf(delta0[1]))]

        def F(u):
            T, avg, lam = integrals(mp.e ** u[0], mp.e ** u[1])
            return [mp.log(T / omega), (avg - a) / drho], lam

        Fu, lam = F(u)
        for _ in range(60):
            if max(abs(Fu[0]), abs(Fu[1])) < mp.mpf(10) ** (-20):
                break
            fd = mp.mpf(10) ** (-12)
            J = mp.matrix(2, 2)
            for col in range(2):
                up = list(u)
                up[col] += fd
                Fp, _ = F(up)
                J[0, col] = (Fp[0] - Fu[0]) / fd
                J[1, col] = (Fp[1] - Fu[1]) / fd
            du = mp.lu_solve(J, mp.matrix(Fu))
            step = 1
            for _ in range(30):
                u_try = [u[0] - step * du[0], u[1] - step * du[1]]
                try:
                    F_try, lam_try = F(u_try)
                except Exception:
                    step /= 2
                    continue
                if max(abs(F_try[0]), abs(F_try[1])) < max(abs(Fu[0]), abs(Fu[1])):
                    u, Fu, lam = u_try, F_try, lam_try
                    break
                step /= 2
            else:
                break
        residual = float(max(abs(Fu[0]), abs(Fu[1])))
        if residual > 1e-8:
            raise TwaveError(f"extended-precision orbit Newton stalled (residual {residual:.3e})")
        return float(mp.e ** u[0]), float(mp.e ** u[1]), float(lam), residual


def solve_periodic_orbit(
    model: EnergyModel,
    eps: float,
    omega: float,
    a: float,
    seed: WaveProfile | None = None,
    n_samples: int | None = None,
) -> WaveProfile:
    """Fundamental (single-oscillation) periodic orbit with period omega and
    average a, reconstructed by quadrature of the conserved level set."""
    bit, W, rho_star = _setup(model)
    if not bit.rho_g < a < bit.rho_l:
        raise TwaveError(f"average {a} outside ({bit.rho_g}, {bit.rho_l})")
    drho = bit.width
    if seed is not None:
        delta0 = (
            max(float(np.min(seed.rho)) - bit.rho_g, 1e-12),
            max(bit.rho_l - float(np.max(seed.rho)), 1e-12),
        )
    else:
        theta = (a - bit.rho_g) / drho
        kg = math.sqrt(max(W.d2(bit.rho_g), 1e-12) / eps)
        kl = math.sqrt(max(W.d2(bit.rho_l), 1e-12) / eps)
        e_g = max(-kg * (1.0 - theta) * 0.5 * omega, math.log(1e-250))
        e_l = max(-kl * theta * 0.5 * omega, math.log(1e-250))
        delta0 = (
            min(drho * math.exp(e_g), 0.5 * (rho_star - bit.rho_g)),
            min(drho * math.exp(e_l), 0.5 * (bit.rho_l - rho_star)),
        )
    lam_override = None
    try:
        orbit, residual = _newton_orbit(W, bit, eps, omega, a, rho_star, delta0)
    except TwaveError:
        if seed is None and min(delta0) > 1e-14:
            try:
                # refresh the seed from the energy minimizer and retry
                seed_prof = minimize_periodic(model, eps, omega, a, grad_tol=1e-8)
                delta1 = (
                    max(float(np.min(seed_prof.rho)) - bit.rho_g, 1e-12),
                    max(bit.rho_l - float(np.max(seed_prof.rho)), 1e-12),
                )
                orbit, residual = _newton_orbit(W, bit, eps, omega, a, rho_star, delta1)
            except TwaveError:
                orbit = None
        else:
            orbit = None
        if orbit is None:
            # dominated turning offset below float resolution: extended precision
            dg, dl, lam_override, residual = _newton_orbit_mp(
                model, bit, eps, omega, a, rho_star, _valid_seed(W, bit, delta0)
            )
            orbit = _Orbit(W, bit, eps, dg, dl, rho_star)
    T, avg = orbit.integrals()

    xg, qg = orbit.graph()
    half = xg[-1]
    # analytic slopes dq/dx = sqrt(2 g / eps) make the graph interpolation
    # fourth order with the turning-point slopes exactly zero
    slopes = np.sqrt(np.maximum(2.0 * orbit.g_mid(qg), 0.0) / eps)
    slopes[0] = slopes[-1] = 0.0
    interp = CubicHermiteSpline(xg, qg, slopes)
    if n_samples is None:
        n_samples = int(min(2 ** 14, max(1024, 2 ** math.ceil(math.log2(20.0 * omega / math.sqrt(eps))))))
    x_u = np.arange(n_samples) * (omega / n_samples)
    x_phys = x_u * (T / omega)  # absorb the (tiny) period residual
    folded = np.where(x_phys <= half, x_phys, T - x_phys)
    folded = np.clip(folded, 0.0, half)
    rho = interp(folded)
    return WaveProfile(
        x=x_u,
        rho=np.asarray(rho),
        omega=omega,
        lam=orbit.lam if lam_override is None else lam_override,
        m=model.m,
        average=avg,
        meta={
            "route": "orbit",
            "eps": eps,
            "H0": orbit.H0,
            "delta_g": orbit.sides[0].delta,
            "delta_l": orbit.sides[1].delta,
            "turning_points": (orbit.q_minus, orbit.q_plus),
            "T": T,
            "newton_residual": residual,
        },
    )


def lambda_decay(
    model: EnergyModel, eps: float, a: float, omegas
) -> list[tuple[float, float]]:
    """Multiplier of the periodic wave for each period in omegas."""
    out = []
    for omega in omegas:
        prof = solve_periodic_orbit(model, eps, float(omega), a)
        out.append((float(omega), prof.lam))
    return out


# ---------------------------------------------------------------------------
# constrained minimization route
# ---------------------------------------------------------------------------


def _slab_init(bit: Bitangent, a: float, omega: float, x: np.ndarray, eps: float):
    theta = (a - bit.rho_g) / bit.width
    w = max(2.0 * math.sqrt(2.0 * eps), 4.0 * (x[1] - x[0]))
    xa = 0.5 * omega * (1.0 - theta)
    xb = 0.5 * omega * (1.0 + theta)
    bump = 0.5 * (np.tanh((x - xa) / w) - np.tanh((x - xb) / w))
    # wrapped copies keep the seed periodic
    bump += 0.5 * (np.tanh((x + omega - xa) / w) - np.tanh((x + omega - xb) / w))
    bump += 0.5 * (np.tanh((x - omega - xa) / w) - np.tanh((x - omega - xb) / w))
    return bit.rho_g + bit.width * bump


def minimize_periodic(
    model: EnergyModel,
    eps: float,
    omega: float,
    a: float,
    n: int | None = None,
    grad_tol: float = 1e-10,
    max_iter: int = 400_000,
) -> WaveProfile:
    """Minimize the relaxed energy over omega-periodic profiles with mean a.

    Projected gradient descent: the gradient mean is subtracted each step
    (enforcing the average constraint), values are clamped to the physical
    window, and a Barzilai-Borwein step with Armijo backtracking keeps the
    energy monotonically non-increasing.  The multiplier is recovered as
    ``lambda = -mean(W'(rho))``.
    """
    bit, W, _ = _setup(model)
    if not bit.rho_g < a < bit.rho_l:
        raise TwaveError(f"average {a} outside ({bit.rho_g}, {bit.rho_l})")
    if eps / omega ** 2 >= 1e-2:
        warnings.warn(
            f"eps/omega^2 = {eps / omega**2:.3g} >= 1e-2: plateau structure may not emerge",
            stacklevel=2,
        )
    N = n if n is not None else max(256, math.ceil(20.0 * omega / math.sqrt(eps)))
    dx = omega / N
    x = np.arange(N) * dx
    rho = _slab_init(bit, a, omega, x, eps)
    rho += a - rho.mean()

    def energy(r):
        dr = (np.roll(r, -1) - r) / dx
        return float(np.sum(0.5 * eps * dr * dr + W(r)) * dx)

    def gradient(r):
        lap = (np.roll(r, -1) - 2.0 * r + np.roll(r, 1)) / (dx * dx)
        return -eps * lap + W.d(r)

    lip = 4.0 * eps / (dx * dx) + float(np.max(np.abs(W.d2(np.linspace(bit.rho_g, bit.rho_l, 101)))))
    eta0 = 1.0 / lip
    E = energy(rho)
    g = gradient(rho)
    pg = g - g.mean()
    rho_prev = None
    pg_prev = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if np.max(np.abs(pg)) <= grad_tol:
            break
        if rho_prev is not None:
            s = rho - rho_prev
            yv = pg - pg_prev
            sy = float(np.dot(s, yv))
            eta = float(np.dot(s, s)) / sy if sy > 0.0 else eta0
            eta = min(max(eta, 1e-3 * eta0), 1e6 * eta0)
        else:
            eta = eta0
        accepted = False
        for _ in range(50):
            trial = np.clip(rho - eta * pg, bit.rho_g, bit.rho_l)
            trial += a - trial.mean()
            E_t = energy(trial)
            # monotone acceptance; near the optimum the decrements fall below
            # float resolution of E, so ties must be allowed
            if E_t <= E and not np.array_equal(trial, rho):
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break  # stalled at rounding level
        rho_prev, pg_prev = rho, pg
        rho, E = trial, E_t
        g = gradient(rho)
        pg = g - g.mean()
    grad_norm = float(np.max(np.abs(pg)))
    if grad_norm > grad_tol and iterations >= max_iter:
        raise TwaveError(
            f"minimizer did not converge: projected gradient {grad_norm:.3e} after {max_iter} iterations"
        )
    lam = -float(np.mean(W.d(rho)))
    return WaveProfile(
        x=x,
        rho=rho,
        omega=omega,
        lam=lam,
        m=model.m,
        average=float(rho.mean()),
        meta={
            "route": "minimize",
            "eps": eps,
            "energy": E,
            "scaled_energy": E / math.sqrt(eps),
            "grad_norm": grad_norm,
            "iterations": iterations,
            "n": N,
        },
    )


# ---------------------------------------------------------------------------
# kink (heteroclinic) route
# ---------------------------------------------------------------------------


def kink_profile(
    model: EnergyModel,
    eps: float,
    window: float | None = None,
    n_samples: int = 4001,
) -> WaveProfile:
    """Monotone profile connecting the two phase densities, lambda = 0.

    Built from the first integral by quadrature
    ``x(rho) = int_{rho_mid}^{rho} sqrt(eps / (2 W(s))) ds`` and centered so
    rho(0) is the mid density.  The default window saturates tanh-like tails
    far below any tolerance used here.
    """
    bit, W, _ = _setup(model)
    if window is None:
        window = 40.0 * math.sqrt(eps)
    drho = bit.width
    scale = math.sqrt(eps / 2.0)
    # keep well offsets representable after adding to the well density
    y_min = max(1e-14 * drho, 8.0 * np.spacing(bit.rho_l))
    sides = []
    for well, d in ((bit.rho_g, +1.0), (bit.rho_l, -1.0)):
        W2 = float(W.d2(well))
        W3 = float(model.d3psi_or_fd(well))
        sides.append((well, d, W2, W3))

    def w_over_y2(well, d, W2, W3, y):
        small = y < _TAYLOR_Y
        out = np.empty_like(y)
        if np.any(small):
            ys = y[small]
            out[small] = 0.5 * W2 + d * W3 / 6.0 * ys
        if np.any(~small):
            yb = y[~small]
            out[~small] = W(well + d * yb) / (yb * yb)
        return np.maximum(out, 1e-300)

    # assemble the ascending graph rho: rho_g + y_min ... rho_l - y_min
    Yg = 0.25 * drho
    Yl = 0.25 * drho
    qa, qb = bit.rho_g + Yg, bit.rho_l - Yl

    def tail_nodes(Y):
        tau_max = math.log(Y / y_min)
        n = max(32, int(math.ceil(tau_max * 40)))
        return Y * np.exp(-np.linspace(0.0, tau_max, n + 1))

    def tail_x(well, d, W2, W3, Y):
        """x-increments along the tail from y = Y down to y_min (log nodes)."""
        ys = tail_nodes(Y)
        a = ys[:-1][:, None]
        b = ys[1:][:, None]
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid + rad * _GL8_NODES[None, :]
        integ = scale / (pts * np.sqrt(w_over_y2(well, d, W2, W3, pts)))
        # dy is negative along the tail; emit positive arc lengths
        seg = -(rad[:, 0]) * (integ @ _GL8_WEIGHTS)
        return ys, seg

    theta = np.linspace(0.0, math.pi, 3001)
    q_mid = 0.5 * (qa + qb) - 0.5 * (qb - qa) * np.cos(theta)
    q_mid[0], q_mid[-1] = qa, qb

    def mid_integrand(pts):
        return scale / np.sqrt(np.maximum(W(pts), 1e-300))

    a_m = q_mid[:-1][:, None]
    b_m = q_mid[1:][:, None]
    mid, rad = 0.5 * (a_m + b_m), 0.5 * (b_m - a_m)
    pts = mid + rad * _GL8_NODES[None, :]
    seg_mid = rad[:, 0] * (mid_integrand(pts) @ _GL8_WEIGHTS)
    x_mid = np.concatenate([[0.0], np.cumsum(seg_mid)])

    ys_g, seg_g = tail_x(*sides[0], Yg)
    x_g = -np.cumsum(seg_g)  # going down-tail moves left of qa
    q_left = bit.rho_g + ys_g[1:]
    ys_l, seg_l = tail_x(*sides[1], Yl)
    x_l = x_mid[-1] + np.cumsum(seg_l)
    q_right = bit.rho_l - ys_l[1:]

    q_all = np.concatenate([q_left[::-1], q_mid, q_right])
    x_all = np.concatenate([x_g[::-1], x_mid, x_l])
    # rounding near the wells can produce repeated graph points; keep the
    # strictly monotone subsequence
    keep = np.concatenate([[True], (np.diff(q_all) > 0) & (np.diff(x_all) > 0)])
    q_all, x_all = q_all[keep], x_all[keep]
    # analytic slopes dq/dx = sqrt(2 W / eps); first-integral of the kink
    slopes = np.sqrt(2.0 * np.maximum(W(q_all), 0.0) / eps)
    interp_q = CubicHermiteSpline(x_all, q_all, slopes)
    # center: rho(0) = mid density
    x_mid_level = brentq(
        lambda x: float(interp_q(x)) - bit.rho_mid, x_all[0], x_all[-1], xtol=1e-15
    )
    x_all = x_all - x_mid_level
    interp_q = CubicHermiteSpline(x_all, q_all, slopes)
    xs = np.linspace(-window, window, n_samples)
    rho = np.where(
        xs <= x_all[0], bit.rho_g + y_min,
        np.where(xs >= x_all[-1], bit.rho_l - y_min, interp_q(np.clip(xs, x_all[0], x_all[-1]))),
    )
    return WaveProfile(
        x=xs,
        rho=np.asarray(rho, dtype=float),
        omega=math.inf,
        lam=0.0,
        m=model.m,
        average=bit.rho_mid,
        meta={"route": "kink", "eps": eps, "window": window},
    )


def kink_limit_check(model: EnergyModel, eps: float, omegas) -> list[tuple[float, float]]:
    """L-inf distance of mid-level-aligned periodic waves to the kink,
    measured on [-omega/4, omega/4] for each period."""
    bit, _, _ = _setup(model)
    a = bit.rho_mid
    window = max(40.0 * math.sqrt(eps), 0.3 * max(omegas))
    kink = kink_profile(model, eps, window=window)
    out = []
    for omega in omegas:
        prof = solve_periodic_orbit(model, eps, float(omega), a)
        shift = prof.upcrossing(bit.rho_mid)
        grid = np.linspace(-omega / 4.0, omega / 4.0, 2001)
        rho_p = prof.eval(grid + shift)
        rho_k = kink.eval(grid)
        out.append((float(omega), float(np.max(np.abs(rho_p - rho_k)))))
    return out


def galilean_assemble(profile: WaveProfile, m: float, u1: float) -> TravelingWave:
    """Assemble the moving-frame family: c = u1 - m / rho_vapor, u = c + m/rho.

    The mass flux rho (u - c) is identically m; a phase transition is present
    exactly when m is nonzero.
    """
    if abs(m - profile.m) > 1e-12:
        raise TwaveError(f"momentum mismatch: profile built with m={profile.m}, got {m}")
    rho_vapor = float(np.min(profile.rho))
    c = u1 - (m / rho_vapor if m != 0.0 else 0.0)
    u = c + m / profile.rho if m != 0.0 else np.full_like(profile.rho, u1)
    prof = WaveProfile(
        x=profile.x, rho=profile.rho, omega=profile.omega, lam=profile.lam,
        m=m, average=profile.average, c=c, meta=dict(profile.meta),
    )
    return TravelingWave(prof, c, u, m, phase_transition=(m != 0.0))


def modica_mortola_check(profile: WaveProfile, model: EnergyModel) -> dict:
    """Discrete Modica-Mortola inequality for a sampled profile.

    Both the per-segment mean of W and the total variation of the primitive
    of sqrt(2 W) are evaluated with the same Gauss nodes, which makes

        E_eps / sqrt(eps) >= TV(G(rho))

    an exact consequence of AM-GM plus Jensen, up to rounding.
    Returns the scaled energy, the total variation, and the slack.
    """
    eps = profile.meta.get("eps")
    if eps is None:
        raise TwaveError("profile.meta['eps'] required for the inequality check")
    bit = bitangent(model)
    W = DoubleWell(model, bit)
    rho = profile.rho
    if math.isinf(profile.omega):
        r0, r1 = rho[:-1], rho[1:]
        dx = profile.x[1] - profile.x[0]
    else:
        r0, r1 = rho, np.roll(rho, -1)
        dx = profile.omega / len(rho)
    mid = 0.5 * (r0 + r1)[:, None]
    rad = 0.5 * (r1 - r0)[:, None]
    pts = mid + rad * _GL8_NODES[None, :]
    w_pts = np.maximum(W(pts), 0.0)
    w_bar = 0.5 * (w_pts @ _GL8_WEIGHTS)          # mean of W over the segment
    tv_seg = np.abs(rad[:, 0]) * (np.sqrt(2.0 * w_pts) @ _GL8_WEIGHTS)
    dr = r1 - r0
    energy = float(np.sum(0.5 * eps * (dr / dx) ** 2 + w_bar) * dx)
    scaled = energy / math.sqrt(eps)
    tv = float(np.sum(tv_seg))
    return {"scaled_energy": scaled, "tv": tv, "slack": scaled - tv}


def profile_to_csv(profile: WaveProfile, path, u1: float = 0.0) -> None:
    """Columns x, rho, u, preceded by a parameter comment line."""
    wave = galilean_assemble(profile, profile.m, u1)
    with open(path, "w", newline="") as fh:
        c = wave.c
        fh.write(
            f"# omega={profile.omega:.17g}, lambda={profile.lam:.17g}, "
            f"m={profile.m:.17g}, c={c:.17g}\n"
        )
        fh.write("x,rho,u\n")
        for x, r, u in zip(profile.x, profile.rho, wave.u):
            fh.write(f"{x:.17g},{r:.17g},{u:.17g}\n")
