import json

import numpy as np
import pytest

import circleflow as cf
from circleflow.measures import CircleMeasure, char_distance

from conftest import random_measure
from oracles import taylor_by_sampling


def test_moment_dirac_at_one():
    assert CircleMeasure.dirac(0.0).moment(5) == pytest.approx(1.0)
    assert CircleMeasure.dirac(0.0, 0.5).moment(3) == pytest.approx(0.5)


def test_moment_haar_vanishes():
    h = CircleMeasure.haar(1.0)
    assert h.moment(2) == 0.0
    assert h.moment(0) == pytest.approx(1.0)


def test_moment_conjugation_and_mass(rng):
    m = random_measure(rng)
    assert m.moment(-3) == pytest.approx(np.conj(m.moment(3)))
    assert m.moment(0) == pytest.approx(m.total_mass)


def test_moment_order_exceeded():
    m = CircleMeasure.from_moments(1.0, [0.5, 0.25])
    with pytest.raises(ValueError, match="exceeds"):
        m.moment(3)


def test_herglotz_series_dirac():
    h = CircleMeasure.dirac(0.0).herglotz_series(4)
    assert np.allclose(h.coeffs, [1, 2, 2, 2, 2])


def test_herglotz_series_haar_constant():
    h = CircleMeasure.haar(1.0).herglotz_series(4)
    assert np.allclose(h.coeffs, [1, 0, 0, 0, 0])


def test_herglotz_series_half_atom_at_minus_one():
    m = CircleMeasure.dirac(np.pi, 0.5)
    h = m.herglotz_series(5)
    assert np.allclose(h.coeffs, [0.5, -1, 1, -1, 1, -1], atol=1e-14)
    # cross-check the coefficients against samples of the exact transform
    sampled = taylor_by_sampling(m.herglotz_eval, 5, points=1024)
    assert np.allclose(h.coeffs, sampled, atol=1e-12)


def test_herglotz_real_part_nonnegative(rng):
    z = 0.9 * np.exp(2j * np.pi * np.arange(512) / 512)
    for _ in range(10):
        m = random_measure(rng)
        vals = m.herglotz_series(32)(z)
        assert np.min(vals.real) >= -1e-10


def test_char_distance_identity(rng):
    m = random_measure(rng)
    assert char_distance(m, m, 12) == 0.0


def test_char_distance_mass_gap():
    a = CircleMeasure.dirac(0.0, 1.0)
    b = CircleMeasure.dirac(0.0, 2.0)
    assert char_distance(a, b, 0) == pytest.approx(1.0)


def test_char_distance_dirac_vs_haar():
    assert char_distance(CircleMeasure.dirac(0.0), CircleMeasure.haar(1.0), 2) \
        == pytest.approx(0.75)


def test_char_distance_is_a_metric(rng):
    for _ in range(20):
        a, b, c = (random_measure(rng) for _ in range(3))
        dab = char_distance(a, b, 8)
        assert dab == pytest.approx(char_distance(b, a, 8))
        assert dab <= char_distance(a, c, 8) + char_distance(c, b, 8) + 1e-12


def test_rotation_examples():
    assert CircleMeasure.dirac(0.0).rotated(np.pi).moment(1) == pytest.approx(-1.0)
    h = CircleMeasure.haar(1.0)
    assert char_distance(h, h.rotated(1.234), 16) == 0.0
    m = CircleMeasure.from_moments(0.5, [0.5]).rotated(np.pi / 2)
    assert m.moment(1) == pytest.approx(0.5j)


def test_rotation_round_trip(rng):
    m = random_measure(rng)
    back = m.rotated(0.7).rotated(-0.7)
    assert np.allclose(back.moments_to(10), m.moments_to(10), atol=1e-14)


def test_fejer_density_haar_and_zero():
    thetas, vals = CircleMeasure.haar(1.0).fejer_density(64)
    assert np.allclose(vals, 1.0 / (2 * np.pi))
    _, zvals = CircleMeasure.zero().fejer_density(64, order=16)
    assert np.allclose(zvals, 0.0)


def test_fejer_density_dirac_peak():
    n = 32
    thetas, vals = CircleMeasure.dirac(0.0, 2.0).fejer_density(256, order=n)
    assert np.argmax(vals) == 0
    assert vals[0] == pytest.approx((n + 1) * 2.0 / (2 * np.pi), rel=1e-12)


def test_toeplitz_accepts_atoms_rejects_overshoot(rng):
    for _ in range(15):
        assert random_measure(rng).is_psd(order=10)
    bad = CircleMeasure.from_moments(1.0, [1.5])
    assert not bad.is_psd()


def test_nearest_psd_projects_into_cone():
    bad = CircleMeasure.from_moments(1.0, [1.5, 0.0, 0.0])
    fixed, adjustment = bad.nearest_psd()
    assert fixed.is_psd(tol=1e-10)
    assert adjustment > 0.1


def test_nearest_psd_preserves_mass():
    bad = CircleMeasure.from_moments(1.0, [1.5, 0.0, 0.0])
    fixed, _ = bad.nearest_psd(preserve_mass=True)
    assert fixed.total_mass == pytest.approx(1.0)
    assert fixed.is_psd(tol=1e-10)


def test_addition_and_scaling(rng):
    a, b = random_measure(rng), random_measure(rng)
    s = a + b
    assert s.moment(2) == pytest.approx(a.moment(2) + b.moment(2))
    assert a.scaled(0.5).total_mass == pytest.approx(0.5 * a.total_mass)
    mixed = a + CircleMeasure.haar(0.3)
    assert mixed.moment(1) == pytest.approx(a.moment(1))
    assert mixed.total_mass == pytest.approx(a.total_mass + 0.3)


def test_json_round_trip(rng):
    for m in (random_measure(rng), CircleMeasure.haar(0.7, order=6),
              CircleMeasure.zero()):
        data = json.loads(json.dumps(m.to_json_dict()))
        back = CircleMeasure.from_json_dict(data)
        assert np.allclose(back.moments_to(5), m.moments_to(5), atol=1e-15)


def test_json_rejects_garbage():
    with pytest.raises(ValueError):
        CircleMeasure.from_json_dict({"nope": 1})
    with pytest.raises(ValueError):
        CircleMeasure.from_json_dict([1, 2])
