"""Shared oracles and random-input builders for the test suite."""
import numpy as np

from slepwave.sphere import HarmonicCoeffs, harmonics_matrix


def random_coeffs(L, seed, real=False):
    """Seeded random harmonic coefficients, optionally with real-field symmetry."""
    rng = np.random.default_rng(seed)
    if not real:
        values = rng.normal(size=L * L) + 1j * rng.normal(size=L * L)
        return HarmonicCoeffs(L, values)
    values = np.zeros(L * L, dtype=complex)
    for l in range(L):
        values[l * l + l] = rng.normal()
        for m in range(1, l + 1):
            re, im = rng.normal(size=2)
            values[l * l + l + m] = re + 1j * im
            values[l * l + l - m] = (-1.0) ** m * (re - 1j * im)
    return HarmonicCoeffs(L, values, real_field=True)


def random_vector(n, seed, real=False):
    rng = np.random.default_rng(seed)
    if real:
        return rng.normal(size=n)
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def quadrature_gram(L, thetas, phis, weights):
    """Brute-force Gram matrix of the harmonics under a point quadrature."""
    Y = harmonics_matrix(L, thetas, phis)
    return (Y * weights[:, None]).conj().T @ Y


def quadrature_inner(field_a, field_b, grid):
    """Brute-force <a, b> = int a conj(b) over the full sphere quadrature."""
    w = np.repeat(grid.weights, grid.n_phi)
    return np.sum(w * field_a.values.ravel() * np.conj(field_b.values.ravel()))
