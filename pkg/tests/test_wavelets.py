import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_vector
from slepwave.errors import NumericalError
from slepwave.slepian import SlepianCoeffs, slepian_synthesis
from slepwave.sphere import make_grid
from slepwave.wavelets import (
    FilterBank,
    TilingParams,
    build_filter_bank,
    eta_lambda,
    k_lambda,
    kappa_lambda,
    s_lambda,
    schwartz_s,
    wavelet_analysis,
    wavelet_energy,
    wavelet_synthesis,
)


def k_oracle(t, lam):
    """Independent evaluation of the plateau function with mpmath quadrature."""
    def bump(u):
        return mpmath.e ** (1 / (u**2 - 1)) if abs(u) < 1 else mpmath.mpf(0)

    def integrand(u):
        return bump(2 * lam / (lam - 1) * (u - 1 / lam) - 1) ** 2 / u

    num = mpmath.quad(integrand, [t, 1])
    den = mpmath.quad(integrand, [1 / lam, 1])
    return float(num / den)


# -- generating functions --------------------------------------------------------

def test_bump_values():
    assert schwartz_s(0.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert schwartz_s(1.0) == 0.0
    assert schwartz_s(-1.0) == 0.0
    assert schwartz_s(2.0) == 0.0
    # continuous at the support boundary
    assert schwartz_s(1.0 - 1e-6) < 1e-100


def test_squeezed_bump_support():
    lam = 3.0
    assert s_lambda(1.0 / lam, lam) == 0.0
    assert s_lambda(1.0, lam) == 0.0
    # the affine map sends the support midpoint to the bump's peak
    assert s_lambda((1.0 + 1.0 / lam) / 2.0, lam) == pytest.approx(math.exp(-1.0), abs=1e-15)
    with pytest.raises(ValueError):
        s_lambda(0.5, 1.0)


def test_plateau_function_limits():
    lam = 3.0
    assert k_lambda(1.0 / lam, lam) == 1.0
    assert k_lambda(0.05, lam) == 1.0
    assert k_lambda(1.0, lam) == 0.0
    assert k_lambda(2.0, lam) == 0.0


def test_plateau_interior_against_mpmath_oracle():
    lam = 3.0
    for t in (0.4, 0.5, 0.6):
        val = k_lambda(t, lam)
        assert 0.0 < val < 1.0
        assert val == pytest.approx(k_oracle(t, lam), abs=1e-10)
    assert k_lambda(0.4, lam) > k_lambda(0.5, lam) > k_lambda(0.6, lam)


def test_plateau_monotone_on_fine_grid():
    lam = 2.0
    ts = np.linspace(1.0 / lam, 1.0, 1000)
    vals = k_lambda(ts, lam)
    assert np.all(np.diff(vals) <= 1e-13)


def test_wavelet_generator_support():
    lam = 3.0
    assert kappa_lambda(1.0 / lam, lam) == 0.0
    assert kappa_lambda(0.1, lam) == 0.0
    assert kappa_lambda(lam, lam) == 0.0
    assert kappa_lambda(5.0, lam) == 0.0
    # both plateaus meet at t = 1: k(1/3) - k(1) = 1
    assert kappa_lambda(1.0, lam) ** 2 == pytest.approx(1.0, abs=1e-15)


def test_scaling_generator_plateaus():
    lam = 3.0
    assert eta_lambda(0.2, lam) == 1.0
    assert eta_lambda(1.5, lam) == 0.0


@given(st.floats(0.01, 5.0))
def test_generator_identity(t):
    # eta^2(t) + kappa^2(t) = k(t / lambda), an algebraic consequence of the
    # definitions, checked pointwise
    lam = 2.0
    lhs = eta_lambda(t, lam) ** 2 + kappa_lambda(t, lam) ** 2
    assert lhs == pytest.approx(k_lambda(t / lam, lam), abs=1e-13)


# -- tiling ---------------------------------------------------------------------

def test_scale_count_for_south_region_size():
    params = TilingParams(lam=3.0, j0=2, p_max=690)
    assert params.j_max == 6
    assert params.j_values == (2, 3, 4, 5, 6)


def test_scale_count_for_larger_region_size():
    params = TilingParams(lam=3.0, j0=2, p_max=1208)
    assert params.j_max == 7
    assert params.j_values == (2, 3, 4, 5, 6, 7)


def test_exact_power_boundary():
    assert TilingParams(lam=2.0, j0=0, p_max=1024).j_max == 10
    assert TilingParams(lam=2.0, j0=0, p_max=1025).j_max == 11


def test_tiling_validation():
    with pytest.raises(ValueError):
        TilingParams(lam=1.0, j0=0, p_max=10)
    with pytest.raises(ValueError):
        TilingParams(lam=3.0, j0=4, p_max=30)  # J = 4 demands J0 < 4
    with pytest.raises(ValueError):
        TilingParams(lam=3.0, j0=-1, p_max=30)
    with pytest.raises(ValueError):
        TilingParams(lam=3.0, j0=0, p_max=0)


@pytest.mark.parametrize("lam", [2.0, 3.0])
@pytest.mark.parametrize("j0", [0, 1, 2])
def test_admissibility(lam, j0):
    for p_max in (30, 690, 1024):
        bank = build_filter_bank(TilingParams(lam=lam, j0=j0, p_max=p_max))
        assert bank.admissibility_residual() < 1e-12


def test_filter_supports():
    params = TilingParams(lam=3.0, j0=2, p_max=690)
    bank = build_filter_bank(params)
    p = np.arange(1, 691)
    for i, j in enumerate(params.j_values):
        nonzero = p[np.abs(bank.wavelets[i]) > 0.0]
        assert nonzero.size > 0
        assert nonzero.min() >= 3.0 ** (j - 1)
        assert nonzero.max() <= 3.0 ** (j + 1)
    scaling_nonzero = p[bank.scaling > 0.0]
    assert scaling_nonzero.max() <= 3.0**params.j0


def test_corrupt_bank_fails_admissibility():
    params = TilingParams(lam=2.0, j0=1, p_max=16)
    bank = build_filter_bank(params)
    corrupt = bank.wavelets.copy()
    corrupt[0, 3] += 0.1
    broken = FilterBank(params, bank.scaling, corrupt)
    assert broken.admissibility_residual() > 1e-10
    with pytest.raises(ValueError):
        FilterBank(params, bank.scaling[:-1], bank.wavelets)


def test_admissibility_guard_raises(monkeypatch):
    import slepwave.wavelets as wv

    params = TilingParams(lam=2.0, j0=1, p_max=16)
    monkeypatch.setattr(wv, "eta_lambda", lambda t, lam: np.zeros_like(np.atleast_1d(t)))
    with pytest.raises(NumericalError):
        wv.build_filter_bank(params)


# -- transforms -----------------------------------------------------------------

@pytest.fixture(scope="module")
def bank30():
    return build_filter_bank(TilingParams(lam=3.0, j0=2, p_max=30))


def test_analysis_of_zero(bank30):
    w = wavelet_analysis(SlepianCoeffs(16, np.zeros(30)), bank30)
    assert np.abs(w.scaling).max() == 0.0
    assert np.abs(w.wavelets).max() == 0.0


def test_analysis_of_unit_vector(bank30):
    f = np.zeros(30)
    f[0] = 1.0
    w = wavelet_analysis(SlepianCoeffs(16, f), bank30)
    assert w.scaling[0] == pytest.approx(bank30.scaling[0], abs=1e-15)
    for i in range(len(bank30.params.j_values)):
        assert w.wavelets[i, 0] == pytest.approx(bank30.wavelets[i, 0], abs=1e-15)
    assert np.abs(w.scaling[1:]).max() == 0.0


def test_round_trip_exact(bank30):
    for seed in range(100):
        f = SlepianCoeffs(16, random_vector(30, seed=seed))
        back = wavelet_synthesis(wavelet_analysis(f, bank30), bank30)
        assert np.abs(back.values - f.values).max() < 1e-12 * np.abs(f.values).max()


def test_parseval_energy_identity(bank30):
    for seed in range(100):
        f = random_vector(30, seed=7000 + seed)
        w = wavelet_analysis(SlepianCoeffs(16, f), bank30)
        total = np.sum(np.abs(w.scaling) ** 2) + np.sum(np.abs(w.wavelets) ** 2)
        energy = np.sum(np.abs(f) ** 2)
        assert abs(total - energy) < 1e-12 * energy


def test_low_band_signal_uses_scaling_only(bank30):
    # filters vanish on p <= lambda^(J0 - 1), so a signal supported there is
    # carried by the scaling coefficients alone
    limit = int(3.0 ** (bank30.params.j0 - 1))
    f = np.zeros(30)
    f[:limit] = random_vector(limit, seed=5, real=True)
    w = wavelet_analysis(SlepianCoeffs(16, f), bank30)
    assert np.abs(w.wavelets[:, :limit]).max() == 0.0
    back = wavelet_synthesis(wavelet_analysis(SlepianCoeffs(16, f), bank30), bank30)
    assert np.abs(back.values - f).max() < 1e-14


def test_analysis_length_contract(bank30):
    with pytest.raises(ValueError):
        wavelet_analysis(SlepianCoeffs(16, np.zeros(29)), bank30)
    longer = SlepianCoeffs(16, np.concatenate([np.ones(30), 5.0 * np.ones(4)]))
    w = wavelet_analysis(longer, bank30)
    assert w.scaling.shape == (30,)


def test_synthesis_rejects_mismatched_bank(bank30):
    other = build_filter_bank(TilingParams(lam=3.0, j0=1, p_max=30))
    w = wavelet_analysis(SlepianCoeffs(16, np.ones(30)), bank30)
    with pytest.raises(ValueError):
        wavelet_synthesis(w, other)


def test_wavelet_energy_trivial_cases(cap_basis16):
    assert wavelet_energy(np.zeros(10)) == 0.0
    unit = np.zeros(10)
    unit[3] = 1.0
    assert wavelet_energy(unit) == 1.0
    with pytest.raises(ValueError):
        wavelet_energy(np.zeros(257), cap_basis16)


def test_wavelet_energy_matches_spatial_quadrature(cap_basis16, grid16, bank30):
    # Parseval oracle: render the filter as a field and integrate its square
    w = np.repeat(grid16.weights, grid16.n_phi)
    for i in range(len(bank30.params.j_values)):
        filt = bank30.wavelets[i]
        field = slepian_synthesis(SlepianCoeffs(16, filt.astype(complex)), cap_basis16, grid16)
        spatial = float(np.sum(w * np.abs(field.values.ravel()) ** 2))
        assert abs(wavelet_energy(filt, cap_basis16) - spatial) < 1e-8
