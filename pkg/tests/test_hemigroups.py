import itertools

import numpy as np
import pytest

import circleflow as cf
from circleflow.hemigroups import kernel_coefficients, kernel_integral, psi_from_eta

from conftest import random_family
from oracles import free_brownian_moment, kernel_raw


# ------------------------------------------------------------------- classical

def test_kernel_polynomial_matches_raw_formula(rng):
    thetas = rng.uniform(0.1, 2 * np.pi - 0.1, 64)
    xi = np.exp(1j * thetas)
    for n in range(1, 9):
        poly = np.polynomial.polynomial.polyval(xi, kernel_coefficients(n))
        assert np.allclose(poly, kernel_raw(n, thetas), atol=1e-10)


def test_kernel_value_at_one_and_bound():
    for n in range(1, 9):
        c = kernel_coefficients(n)
        assert np.sum(c).real == pytest.approx(-n * n)   # value at xi = 1
        assert np.sum(np.abs(c)) <= n ** 3 + 1e-12       # sup bound on the circle


def test_kernel_integral_same_for_atom_and_moment_form(rng):
    atoms = cf.CircleMeasure.from_atoms([(1.0, 0.4), (4.0, 0.2)])
    as_moments = cf.CircleMeasure(moments=atoms.moments_to(16))
    for n in (1, 3, 7):
        assert kernel_integral(atoms, n) == pytest.approx(
            kernel_integral(as_moments, n), abs=1e-13)


def test_classical_normal_value():
    f = cf.normal_family(horizon=2.0)
    assert cf.classical_moment(f, 0, 2, 1) == pytest.approx(np.exp(-1), abs=1e-13)


def test_classical_pure_drift():
    f = cf.rotation_family(rate=1.0, horizon=2.0)
    assert cf.classical_moment(f, 0, np.pi / 2, 2) == pytest.approx(-1.0, abs=1e-13)


def test_classical_trivial_increment(rng):
    f = random_family(rng)
    assert cf.classical_moment(f, 0.4, 0.4, 5) == 1.0
    assert cf.classical_moment(f, 0.2, 0.7, 0) == 1.0


def test_classical_modulus_and_log_bound(rng):
    for _ in range(10):
        f = random_family(rng)
        s, t = np.sort(rng.uniform(0, f.horizon, 2))
        for n in (1, 2, 5):
            val = cf.classical_moment(f, s, t, n)
            assert abs(val) <= 1.0 + 1e-12
            bound = abs(f.alpha_increment(s, t) * n) \
                + n ** 3 * f.sigma_increment(s, t).total_mass
            assert abs(np.log(val)) <= bound + 1e-10


def test_classical_negative_order_conjugates(rng):
    f = random_family(rng)
    assert cf.classical_moment(f, 0, 1, -2) == pytest.approx(
        np.conj(cf.classical_moment(f, 0, 1, 2)))


# ------------------------------------------------------------------------ free

def test_free_sigma_series_normal_constant_term():
    s = cf.free_sigma_series(cf.normal_family(), 0, 1, 8)
    assert s.coeffs[0] == pytest.approx(np.exp(0.5))


def test_free_sigma_series_degenerate_families():
    z = cf.free_sigma_series(cf.zero_family(), 0, 1, 6)
    assert np.allclose(z.coeffs, [1, 0, 0, 0, 0, 0, 0])
    r = cf.free_sigma_series(cf.rotation_family(rate=1.0), 0, 0.7, 6)
    assert r.coeffs[0] == pytest.approx(np.exp(-0.7j))
    assert np.allclose(r.coeffs[1:], 0.0)


def test_free_moments_closed_forms(rng):
    f = cf.normal_family(horizon=2.0)
    for n in (1, 2, 3, 4, 5):
        for t in (0.3, 1.0, 1.7):
            assert cf.free_moment(f, 0, t, n) == pytest.approx(
                free_brownian_moment(n, t), abs=1e-12)


def test_free_first_and_second_moment_formulas(rng):
    for _ in range(10):
        f = random_family(rng)
        s, t = np.sort(rng.uniform(0, f.horizon, 2))
        sig = f.sigma_increment(s, t)
        w = np.exp(1j * f.alpha_increment(s, t) - sig.total_mass)
        assert cf.free_moment(f, s, t, 1) == pytest.approx(w, abs=1e-10)
        m2 = w ** 2 * (1 - 2 * sig.moment(1))
        assert cf.free_moment(f, s, t, 2) == pytest.approx(m2, abs=1e-10)


def test_free_trivial_increment(rng):
    assert cf.free_moment(random_family(rng), 0.3, 0.3, 4) == pytest.approx(1.0)


def test_free_haar_degenerate_rejected():
    f = cf.haar_family(rate=40.0)
    with pytest.raises(ValueError, match="mean"):
        cf.free_moment(f, 0, 1, 1)


def test_free_pointwise_matches_series(rng):
    f = random_family(rng)
    eta = cf.free_eta_series(f, 0, 1, 32)
    for z in (0.3, 0.2 + 0.2j, -0.35j):
        assert cf.free_eta_value(f, 0, 1, z) == pytest.approx(eta(z), abs=1e-9)


# --------------------------------------------------------------------- boolean

def test_boolean_eta_closed_form_value():
    eta = cf.boolean_eta_series(cf.normal_family(), 0, 1, 24)
    assert eta(0.5) == pytest.approx(0.5 * np.exp(-1.5), abs=1e-9)
    assert eta(0.0) == 0.0


def test_boolean_zero_family_is_identity():
    eta = cf.boolean_eta_series(cf.zero_family(), 0, 1, 6)
    assert np.allclose(eta.coeffs, [0, 1, 0, 0, 0, 0, 0])


def test_boolean_linear_coefficient(rng):
    f = random_family(rng)
    s, t = 0.2, 0.9
    eta = cf.boolean_eta_series(f, s, t, 8)
    expected = np.exp(1j * f.alpha_increment(s, t)
                      - f.sigma_increment(s, t).total_mass)
    assert eta.coeffs[1] == pytest.approx(expected, abs=1e-12)


# -------------------------------------------------------------------- monotone

def test_monotone_trivial_and_rotation():
    f = cf.rotation_family(rate=2.0)
    assert cf.monotone_eta(f, 0.4, 0.4, 0.3 + 0.1j) == pytest.approx(0.3 + 0.1j)
    assert cf.monotone_eta(f, 0.0, 0.5, 0.2) == pytest.approx(
        0.2 * np.exp(1j), abs=1e-12)


def test_monotone_derivative_at_origin_by_finite_difference():
    f = cf.normal_family()
    h = 1e-4
    d = (cf.monotone_eta(f, 0, 1, h) - cf.monotone_eta(f, 0, 1, -h)) / (2 * h)
    assert d == pytest.approx(np.exp(-0.5), abs=1e-7)


# -------------------------------------------------------- dispatch + the laws

def test_moment_dispatch_examples():
    assert cf.moment("classical", cf.normal_family(horizon=2.0), 0, 2, 1) \
        == pytest.approx(np.exp(-1))
    phi = 0.8
    assert cf.moment(cf.LawKind.MONOTONE, cf.rotation_family(), 0, phi, 1) \
        == pytest.approx(np.exp(1j * phi), abs=1e-10)
    assert cf.moment("boolean", cf.zero_family(), 0, 1, 3) == pytest.approx(1.0)


def test_hemigroup_law_classical(rng):
    f = random_family(rng)
    s, t, u = np.sort(rng.uniform(0, f.horizon, 3))
    for n in range(-3, 4):
        lhs = cf.classical_moment(f, s, u, n)
        rhs = cf.classical_moment(f, s, t, n) * cf.classical_moment(f, t, u, n)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_hemigroup_law_free_series(rng):
    f = random_family(rng)
    s, t, u = np.sort(rng.uniform(0, f.horizon, 3))
    lhs = cf.free_sigma_series(f, s, u, 24)
    rhs = cf.free_sigma_series(f, s, t, 24) * cf.free_sigma_series(f, t, u, 24)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-10)


def test_hemigroup_law_boolean_series(rng):
    f = random_family(rng)
    s, t, u = np.sort(rng.uniform(0, f.horizon, 3))
    lhs = cf.boolean_eta_series(f, s, u, 24).shifted(1)
    rhs = cf.boolean_eta_series(f, s, t, 24) * cf.boolean_eta_series(f, t, u, 24)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-10)


def test_hemigroup_law_monotone_pointwise(rng):
    f = random_family(rng)
    s, t, u = np.sort(rng.uniform(0, f.horizon, 3))
    z = 0.5 * np.exp(2j * np.pi * np.arange(5) / 5) * np.array([[1.0], [0.4]])
    lhs = cf.solve_transition(f, s, u, z)
    rhs = cf.solve_transition(f, s, t, cf.solve_transition(f, t, u, z))
    assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_first_moment_identity_across_laws(rng):
    f = random_family(rng)
    s, t = 0.15, 0.85
    expected = np.exp(1j * f.alpha_increment(s, t)
                      - f.sigma_increment(s, t).total_mass)
    for kind in cf.LawKind:
        if kind is cf.LawKind.CLASSICAL:
            continue
        assert cf.moment(kind, f, s, t, 1) == pytest.approx(expected, abs=1e-8)


def test_generator_identity_discrepancies_shrink():
    f = cf.two_atom_family()
    hs = [0.1, 0.05, 0.025]
    kinds = list(cf.LawKind)
    for n in (2, 3):
        d = {k: np.array([(cf.moment(k, f, 0, h, n) - 1) / h for h in hs])
             for k in kinds}
        for a, b in itertools.combinations(kinds, 2):
            gap = np.abs(d[a] - d[b])
            assert np.all(gap[:-1] / gap[1:] >= 1.8)


def test_psi_reads_moments():
    eta = cf.free_eta_series(cf.normal_family(), 0, 1, 8)
    psi = psi_from_eta(eta)
    assert psi.coeffs[1] == pytest.approx(np.exp(-0.5))
