"""Characteristic cubic evaluation, root solving, and root-structure invariants."""

import numpy as np
import pytest

from eulermaxwell.spectrum import (asymptotic_roots, characteristic_value,
                                   longitudinal_roots, real_root_grid,
                                   roots_grid, transverse_roots)

# golden values frozen from a 40-digit bisection/Newton run
SIGMA_LONG_K1 = -0.7300496011422916
SIGMA_TRANS_K1 = -0.5698402909980533


def test_characteristic_value_examples():
    assert characteristic_value("long", -1.0, 2.0) == pytest.approx(-8.0 / 3.0,
                                                                    abs=1e-15)
    # the k-dependence cancels exactly at X = -3/5
    for kmag in (0.0, 1.0, 7.5):
        assert characteristic_value("long", -0.6, kmag) == pytest.approx(
            38.0 / 125.0, abs=1e-14)
    assert characteristic_value("trans", 0.0, 3.0) == pytest.approx(9.0)


def test_family_aliases_and_errors():
    assert characteristic_value("longitudinal", -1.0, 2.0) == \
        characteristic_value("long", -1.0, 2.0)
    with pytest.raises(ValueError):
        characteristic_value("sideways", 0.0, 1.0)


def test_longitudinal_roots_limits():
    r0 = longitudinal_roots(0.0)
    assert (r0.sigma, r0.beta) == (-1.0, -0.5)
    assert r0.omega == pytest.approx(np.sqrt(3.0) / 2.0, rel=1e-15)

    r1 = longitudinal_roots(1.0)
    assert r1.sigma == pytest.approx(SIGMA_LONG_K1, abs=1e-14)

    # sigma -> -3/5 from below as |k| grows
    assert abs(longitudinal_roots(1e3).sigma + 0.6) < 1e-4


def test_transverse_roots_limits():
    r0 = transverse_roots(0.0)
    assert (r0.sigma, r0.beta) == (0.0, -0.5)
    assert r0.omega == pytest.approx(np.sqrt(3.0) / 2.0, rel=1e-15)

    r1 = transverse_roots(1.0)
    assert r1.sigma == pytest.approx(SIGMA_TRANS_K1, abs=1e-14)

    assert abs(transverse_roots(1e3).sigma + 1.0) < 1e-4


def test_negative_kmag_rejected():
    with pytest.raises(ValueError):
        longitudinal_roots(-1.0)
    with pytest.raises(ValueError):
        real_root_grid("trans", np.array([1.0, -2.0]))


@pytest.fixture(scope="module")
def log_grid():
    kmags = np.geomspace(1e-3, 1e3, 1000)
    return {
        "kmags": kmags,
        "long": roots_grid("long", kmags),
        "trans": roots_grid("trans", kmags),
    }


def test_monotonicity(log_grid):
    sig_l = log_grid["long"][0]
    sig_t = log_grid["trans"][0]
    assert np.all(np.diff(sig_l) > 0)
    assert np.all(np.diff(sig_t) < 0)
    assert np.all((sig_l > -1.0) & (sig_l < -0.6))
    assert np.all((sig_t > -1.0) & (sig_t < 0.0))


def test_residual_bound(log_grid):
    kmags = log_grid["kmags"]
    for family in ("long", "trans"):
        sigma = log_grid[family][0]
        resid = np.abs(characteristic_value(family, sigma, kmags))
        assert np.all(resid <= 1e-12 * (1.0 + kmags ** 3))


def test_beta_omega_relations(log_grid):
    sig, beta, omega = log_grid["long"]
    assert np.max(np.abs(beta - (-1.0 - sig / 2.0))) <= 1e-12
    assert np.all(omega > np.sqrt(6.0) / 3.0)
    sig_t, beta_t, omega_t = log_grid["trans"]
    assert np.max(np.abs(beta_t - (-(1.0 + sig_t) / 2.0))) <= 1e-12
    assert np.all(omega_t > np.sqrt(6.0) / 3.0)
    assert np.all((beta > -0.7) & (beta < -0.5 + 1e-12))
    assert np.all((beta_t > -0.5) & (beta_t < 0.0))


def test_root_set_reconstructs_cubic(log_grid):
    """Expanding (X - sigma)(X - beta - iw)(X - beta + iw) recovers the cubic."""
    kmags = log_grid["kmags"]
    for family, coeffs in (
        ("long", lambda k2: (2.0, 2.0 + 5.0 / 3.0 * k2, 1.0 + k2)),
        ("trans", lambda k2: (1.0, 1.0 + k2, k2)),
    ):
        sig, beta, omega = log_grid[family]
        pair_sq = beta ** 2 + omega ** 2
        c2 = -(sig + 2.0 * beta)
        c1 = pair_sq + 2.0 * sig * beta
        c0 = -sig * pair_sq
        e2, e1, e0 = coeffs(kmags ** 2)
        for got, want in ((c2, e2), (c1, e1), (c0, e0)):
            assert np.max(np.abs(got - want) / np.abs(want)) <= 1e-10


def test_small_k_curvature_stabilizes():
    """(sigma + 1) / k^2 approaches a positive constant as k -> 0."""
    vals = [(longitudinal_roots(k).sigma + 1.0) / k ** 2 for k in (1e-2, 1e-3)]
    assert all(v > 0 for v in vals)
    assert abs(vals[0] - vals[1]) / vals[1] < 0.05
    # the limit constant itself (2/3) is an observation, not an assertion
    assert vals[1] == pytest.approx(2.0 / 3.0, rel=1e-3)


def test_asymptotic_roots_values():
    r = asymptotic_roots("long", 1e-3, "small")
    assert (r.sigma, r.beta) == (-1.0, -0.5)
    assert r.omega == pytest.approx(np.sqrt(3.0) / 2.0)

    r = asymptotic_roots("long", 1e3, "large")
    assert r.omega == pytest.approx(np.sqrt(5.0 / 3.0) * 1e3, rel=1e-12)
    # exact omega approaches the asymptote
    exact = longitudinal_roots(1e3)
    assert exact.omega == pytest.approx(r.omega, rel=1e-4)

    r = asymptotic_roots("trans", 1e-3, "small")
    assert (r.sigma, r.beta) == (0.0, -0.5)


def test_asymptotic_roots_regime_mismatch():
    with pytest.raises(ValueError):
        asymptotic_roots("long", 2.0, "small")
    with pytest.raises(ValueError):
        asymptotic_roots("trans", 0.5, "large")
    with pytest.raises(ValueError):
        asymptotic_roots("long", 1.0, "medium")


def test_random_kmag_property():
    rng = np.random.default_rng(0)
    kmags = 10.0 ** rng.uniform(-3, 3, size=200)
    for family in ("long", "trans"):
        sigma = real_root_grid(family, kmags)
        resid = np.abs(characteristic_value(family, sigma, kmags))
        assert np.all(resid <= 1e-12 * (1.0 + kmags ** 3))
