import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from nsk1d.elliptic import EPS_MAX, CnoidalWave, elliptic_k, jacobi_sn, jacobi_sn_cn_dn
from nsk1d.energy import quartic_model


def k_quadrature(k: float) -> float:
    val, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
                  0.0, math.pi / 2.0, epsabs=1e-14, epsrel=1e-14, limit=200)
    return val


def sn_quadrature(u: float, k: float) -> float:
    """Defining-integral oracle: invert u = F(phi, k), reduce by sn(u+2K) = -sn(u)."""
    K = k_quadrature(k)
    n = round(u / (2.0 * K))
    r = u - 2.0 * n * K

    def F(phi):
        val, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
                      0.0, phi, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val

    phi = brentq(lambda p: F(p) - r, -math.pi / 2, math.pi / 2, xtol=1e-14)
    return (-1.0) ** (n % 2) * math.sin(phi)


def test_k_zero():
    assert abs(elliptic_k(0.0) - math.pi / 2.0) <= 1e-12


def test_k_half_vs_quadrature():
    assert abs(elliptic_k(0.5) - k_quadrature(0.5)) <= 1e-12


def test_k_domain():
    with pytest.raises(ValueError):
        elliptic_k(1.0)
    with pytest.raises(ValueError):
        elliptic_k(-0.1)


def test_k_log_asymptote():
    k = 0.999999
    kc = math.sqrt((1.0 - k) * (1.0 + k))
    ratio = elliptic_k(k) / math.log(4.0 / kc)
    assert 1.0 <= ratio <= 1.01


def test_k_monotone():
    ks = np.linspace(0.0, 0.999, 200)
    vals = [elliptic_k(k) for k in ks]
    assert np.all(np.diff(vals) > 0)


def test_sn_odd_and_zero():
    for k in (0.0, 0.3, 0.7, 0.95, 1.0):
        assert jacobi_sn(0.0, k) == 0.0
        for u in (0.3, 1.7, 4.1):
            assert jacobi_sn(-u, k) == pytest.approx(-jacobi_sn(u, k), abs=1e-13)


def test_sn_degenerate_moduli():
    u = np.linspace(-6, 6, 100)
    assert np.max(np.abs(jacobi_sn(u, 0.0) - np.sin(u))) <= 1e-13
    u20 = np.linspace(-5, 5, 20)
    assert np.max(np.abs(jacobi_sn(u20, 1.0) - np.tanh(u20))) <= 1e-13


def test_sn_quarter_period():
    for k in (0.3, 0.7, 0.95):
        assert jacobi_sn(elliptic_k(k), k) == pytest.approx(1.0, abs=1e-12)


def test_sn_bounded():
    for k in (0.1, 0.5, 0.9, 0.99):
        K = elliptic_k(k)
        u = np.linspace(-8 * K, 8 * K, 257)
        assert np.max(np.abs(jacobi_sn(u, k))) <= 1.0 + 1e-12


def test_sn_vs_quadrature_oracle_grid():
    """200-point (u, k) grid against the defining-integral oracle."""
    worst = 0.0
    for k in np.linspace(0.02, 0.98, 10):
        K = elliptic_k(k)
        for u in np.linspace(-8 * K, 8 * K, 20):
            worst = max(worst, abs(jacobi_sn(u, k) - sn_quadrature(u, k)))
    assert worst <= 1e-10


def test_sn_cn_dn_identities():
    for k in (0.2, 0.6, 0.9):
        for u in np.linspace(-5, 5, 23):
            sn, cn, dn = jacobi_sn_cn_dn(u, k)
            assert sn * sn + cn * cn == pytest.approx(1.0, abs=1e-11)
            assert dn * dn + (k * sn) ** 2 == pytest.approx(1.0, abs=1e-11)


def test_sn_against_mpmath_spot():
    mp = pytest.importorskip("mpmath")
    for k in (0.5, 0.9, 0.999):
        for u in (0.7, 2.3, -4.1):
            ref = float(mp.ellipfun("sn", u, m=k * k))
            assert jacobi_sn(u, k) == pytest.approx(ref, abs=5e-13)


def test_from_eps_round_trip():
    for eps in (1e-4, 1e-5):
        w = CnoidalWave.from_eps(eps)
        assert abs(w.residual()) <= 1e-12
        assert 0.0 < w.k < 1.0


def test_from_eps_monotone_in_eps():
    k4 = CnoidalWave.from_eps(1e-4).k
    k5 = CnoidalWave.from_eps(1e-5).k
    assert k5 > k4


def test_from_eps_admissibility():
    with pytest.raises(ValueError):
        CnoidalWave.from_eps(EPS_MAX)
    with pytest.raises(ValueError):
        CnoidalWave.from_eps(0.01)  # above the k -> 0 bound
    with pytest.raises(ValueError):
        CnoidalWave.from_eps(0.0)


def test_amplitude_range_and_profile_range():
    for eps in (1e-3, 1e-4, 1e-5):
        w = CnoidalWave.from_eps(eps)
        assert 0.0 < w.amplitude <= 0.5
        x = np.linspace(0, 1, 2001)
        r = w.rho(x)
        # the range is inside (1, 2); at eps = 1e-5 the gap to the wells is
        # ~1e-24, below float resolution, so allow touching to rounding
        assert np.all(r >= 1.0 - 1e-12) and np.all(r <= 2.0 + 1e-12)
    w = CnoidalWave.from_eps(1e-3)
    assert w.amplitude < 0.5
    r = w.rho(np.linspace(0, 1, 2001))
    assert np.all(r > 1.0) and np.all(r < 2.0)


def test_profile_basic_points():
    w = CnoidalWave.from_eps(1e-4)
    assert w.rho(0.0) == pytest.approx(1.5, abs=1e-14)
    assert w.rho(0.25) == pytest.approx(1.5 + w.amplitude, abs=1e-12)


def test_profile_period_one_mean():
    w = CnoidalWave.from_eps(1e-4)
    val, _ = quad(lambda x: float(w.rho(x)), 0.0, 1.0, limit=400)
    assert val == pytest.approx(1.5, abs=1e-9)


def test_profile_ode_residual():
    """eps rho'' = Psi'(rho) pointwise; arbitrates the printed /pi variant."""
    model = quartic_model()
    for eps in (1e-4, 1e-3):
        w = CnoidalWave.from_eps(eps)
        x = np.linspace(0.0, 1.0, 10001)
        resid = eps * w.d2rho(x) - model.dpsi(w.rho(x))
        assert np.max(np.abs(resid)) <= 1e-8


def test_printed_pi_variant_fails_ode():
    model = quartic_model()
    eps = 1e-3
    w = CnoidalWave.from_eps(eps)
    x = np.linspace(0.0, 1.0, 512)
    rho_pi = w.rho_printed_variant(x)
    # second derivative by finite differences on the dense grid
    d2 = np.gradient(np.gradient(rho_pi, x), x)
    resid = eps * d2[5:-5] - model.dpsi(rho_pi[5:-5])
    assert np.max(np.abs(resid)) > 1e-3  # inconsistent profile: no typo hiding


def test_drho_consistency():
    w = CnoidalWave.from_eps(1e-3)
    x = np.linspace(0, 1, 101)
    h = 1e-6
    fd = (w.rho(x + h) - w.rho(x - h)) / (2 * h)
    assert np.max(np.abs(fd - w.drho(x))) < 1e-6


def test_exact_solution_shifts():
    w = CnoidalWave.from_eps(1e-4)
    x = np.linspace(0, 1, 301)
    r0, u0 = w.state(x, 0.0, 2.0)
    assert np.array_equal(u0, np.full_like(x, 2.0))
    r_half, _ = w.state(x, 0.5, 2.0)  # shift by exactly one period
    assert np.max(np.abs(r_half - r0)) <= 1e-12
    r_quarter, _ = w.state(np.array([0.0]), 0.25, 2.0)  # half period
    assert r_quarter[0] == pytest.approx(1.5, abs=1e-12)
