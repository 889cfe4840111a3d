import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_legendre

from helpers import quadrature_gram, random_coeffs
from slepwave.sphere import (
    FOUR_PI,
    GridSpec,
    HarmonicCoeffs,
    SampledField,
    flat_index,
    forward_sht,
    inverse_sht,
    lm_from_flat,
    make_grid,
    ylm_eval,
)


def test_flat_index_round_trip():
    for idx in range(15 * 15):
        l, m = lm_from_flat(idx)
        assert abs(m) <= l
        assert flat_index(l, m) == idx


def test_y00_is_constant():
    for theta, phi in [(0.0, 0.0), (1.3, 2.2), (math.pi, 5.1)]:
        assert ylm_eval(0, 0, theta, phi) == pytest.approx(1.0 / math.sqrt(FOUR_PI), abs=1e-15)


def test_y10_at_pole():
    # closed form: sqrt(3/(4*pi)) * cos(theta)
    assert ylm_eval(1, 0, 0.0, 0.0) == pytest.approx(math.sqrt(3.0 / FOUR_PI), abs=1e-15)
    theta = 0.913
    assert ylm_eval(1, 0, theta, 1.0) == pytest.approx(
        math.sqrt(3.0 / FOUR_PI) * math.cos(theta), abs=1e-14
    )


@given(st.integers(0, 14), st.floats(0.0, math.pi), st.floats(0.0, 2.0 * math.pi))
def test_addition_theorem_diagonal(l, theta, phi):
    total = sum(abs(ylm_eval(l, m, theta, phi)) ** 2 for m in range(-l, l + 1))
    assert total == pytest.approx((2 * l + 1) / FOUR_PI, rel=1e-12)


def test_addition_theorem_pairs():
    rng = np.random.default_rng(42)
    for _ in range(20):
        t1, t2 = rng.uniform(0.0, math.pi, size=2)
        p1, p2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
        cos_gamma = math.cos(t1) * math.cos(t2) + math.sin(t1) * math.sin(t2) * math.cos(p1 - p2)
        for l in rng.integers(0, 16, size=4):
            lhs = sum(
                ylm_eval(l, m, t1, p1) * np.conj(ylm_eval(l, m, t2, p2))
                for m in range(-l, l + 1)
            )
            rhs = (2 * l + 1) / FOUR_PI * eval_legendre(l, cos_gamma)
            assert abs(lhs - rhs) < 1e-10


def test_ylm_conjugation_convention():
    theta, phi = 0.7, 1.9
    for l in range(6):
        for m in range(-l, l + 1):
            lhs = np.conj(ylm_eval(l, m, theta, phi))
            rhs = (-1.0) ** m * ylm_eval(l, -m, theta, phi)
            assert abs(lhs - rhs) < 1e-14


def test_ylm_domain_errors():
    with pytest.raises(ValueError):
        ylm_eval(2, 3, 0.5, 0.5)
    with pytest.raises(ValueError):
        ylm_eval(-1, 0, 0.5, 0.5)
    with pytest.raises(ValueError):
        ylm_eval(1, 0, -0.1, 0.5)
    with pytest.raises(ValueError):
        ylm_eval(1, 0, math.pi + 0.1, 0.5)


def test_make_grid_l1_weights():
    grid = make_grid(1)
    assert grid.n_theta == 1
    assert grid.n_phi * grid.weights.sum() == pytest.approx(FOUR_PI, rel=1e-15)


@pytest.mark.parametrize("L", [1, 8, 16, 33])
def test_grid_weights_sum_to_sphere_area(L):
    grid = make_grid(L)
    total = grid.n_phi * float(grid.weights.sum())
    assert abs(total - FOUR_PI) < 1e-12 * FOUR_PI
    assert np.all(grid.weights > 0)


def test_make_grid_rejects_bad_bandlimit():
    with pytest.raises(ValueError):
        make_grid(0)


def test_constant_integrates_to_sphere_area():
    grid = make_grid(8)
    ones = SampledField(grid, np.ones((grid.n_theta, grid.n_phi)))
    coeffs = forward_sht(ones)
    # f_00 = <1, Y_00> = sqrt(4*pi)
    assert coeffs.values[0] == pytest.approx(math.sqrt(FOUR_PI), abs=1e-12)


def test_quadrature_orthonormality_l16():
    grid = make_grid(16)
    t, p, w = grid.node_arrays()
    gram = quadrature_gram(16, t, p, w)
    assert np.abs(gram - np.eye(256)).max() < 1e-10


def test_forward_of_single_harmonic(grid16):
    tt, pp = np.meshgrid(grid16.theta_nodes, grid16.phi_nodes, indexing="ij")
    field = SampledField(grid16, ylm_eval(2, 1, tt, pp))
    coeffs = forward_sht(field)
    assert coeffs.values[flat_index(2, 1)] == pytest.approx(1.0, abs=1e-12)
    rest = np.delete(coeffs.values, flat_index(2, 1))
    assert np.abs(rest).max() < 1e-10


def test_forward_of_constant(grid16):
    c = 2.75 - 0.5j
    field = SampledField(grid16, np.full((grid16.n_theta, grid16.n_phi), c))
    coeffs = forward_sht(field)
    assert coeffs.values[0] == pytest.approx(c * math.sqrt(FOUR_PI), abs=1e-12)
    assert np.abs(coeffs.values[1:]).max() < 1e-12


def test_inverse_of_zero(grid16):
    field = inverse_sht(HarmonicCoeffs(16, np.zeros(256)), grid16)
    assert np.abs(field.values).max() == 0.0


def test_inverse_of_f00_is_one(grid16):
    values = np.zeros(256, dtype=complex)
    values[0] = math.sqrt(FOUR_PI)
    field = inverse_sht(HarmonicCoeffs(16, values), grid16)
    assert np.abs(field.values - 1.0).max() < 1e-12


def test_inverse_delta_matches_direct_evaluation(grid16):
    values = np.zeros(256, dtype=complex)
    values[flat_index(3, -2)] = 1.0
    field = inverse_sht(HarmonicCoeffs(16, values), grid16)
    tt, pp = np.meshgrid(grid16.theta_nodes, grid16.phi_nodes, indexing="ij")
    assert np.abs(field.values - ylm_eval(3, -2, tt, pp)).max() < 1e-12


@pytest.mark.parametrize("L", [4, 16, 32])
def test_round_trip(L):
    grid = make_grid(L)
    coeffs = random_coeffs(L, seed=L)
    back = forward_sht(inverse_sht(coeffs, grid))
    err = np.abs(back.values - coeffs.values).max()
    assert err < 1e-10 * np.abs(coeffs.values).max()


def test_inverse_accepts_lower_bandlimit():
    small = random_coeffs(4, seed=9)
    grid = make_grid(8)
    field = inverse_sht(small, grid)
    back = forward_sht(field)
    assert np.abs(back.values[:16] - small.values).max() < 1e-12
    assert np.abs(back.values[16:]).max() < 1e-12


def test_inverse_rejects_higher_bandlimit(grid8):
    with pytest.raises(ValueError):
        inverse_sht(random_coeffs(16, seed=0), grid8)


def test_field_shape_mismatch_rejected(grid8):
    with pytest.raises(ValueError):
        SampledField(grid8, np.zeros((3, 3)))


def test_real_symmetric_coeffs_render_real(grid16):
    coeffs = random_coeffs(16, seed=5, real=True)
    field = inverse_sht(coeffs, grid16)
    assert np.abs(field.values.imag).max() < 1e-10 * np.abs(field.values.real).max()


def test_real_flag_validation():
    good = random_coeffs(8, seed=1, real=True)
    assert good.real_field
    bad = good.values.copy()
    bad[flat_index(2, 1)] += 0.3
    with pytest.raises(ValueError):
        HarmonicCoeffs(8, bad, real_field=True)


def test_coeff_count_enforced():
    with pytest.raises(ValueError):
        HarmonicCoeffs(4, np.zeros(15))


def test_grid_spec_validation():
    grid = make_grid(4)
    with pytest.raises(ValueError):
        GridSpec(4, 4, 8, grid.theta_nodes, grid.phi_nodes, -grid.weights)
    with pytest.raises(ValueError):
        GridSpec(4, 4, 8, grid.theta_nodes, grid.phi_nodes, grid.weights * 1.01)
