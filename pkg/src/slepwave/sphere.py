"""Sampling grids, quadrature, and spherical harmonic transforms at a bandlimit.

Conventions used throughout the package:

* orthonormal complex spherical harmonics with the Condon-Shortley phase,
  so conj(Y_lm) = (-1)^m Y_{l,-m} and a real field has
  conj(f_lm) = (-1)^m f_{l,-m};
* coefficients stored flat at index l*l + l + m for 0 <= l < L, |m| <= l;
* Gauss-Legendre nodes in cos(theta) crossed with equispaced longitudes,
  which integrates a product of any two bandlimit-L harmonics exactly.

Transforms are separable (FFT over longitude, weighted sums over the
colatitude rings), O(L^3) overall, and pure functions of their inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * math.pi


def flat_index(l, m):
    """Flat coefficient index l*l + l + m."""
    return l * l + l + m


def lm_from_flat(idx):
    """Inverse of ``flat_index``."""
    l = math.isqrt(idx)
    return l, idx - l * l - l


def n_coeffs(L):
    return L * L


def _tri_offset(m, L):
    # first column of the degree run for order m in a legendre_table
    return m * L - (m * (m - 1)) // 2


def legendre_table(L, x):
    """Normalised associated Legendre values for all 0 <= m <= l < L.

    Parameters
    ----------
    L : int
        Bandlimit; degrees 0..L-1 are produced.
    x : array_like
        Evaluation points in [-1, 1] (cosines of colatitude).

    Returns
    -------
    (len(x), L*(L+1)//2) array whose column ``_tri_offset(m, L) + (l - m)``
    holds P~_l^m(x), normalised so that Y_lm = P~_l^|m| * exp(i m phi) for
    m >= 0 gives orthonormal harmonics with the Condon-Shortley phase.

    Ascending three-term recursion in l at fixed m on the fully normalised
    functions; no factorials are formed, so the recursion is stable for L
    into the hundreds.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    npts = x.size
    out = np.empty((npts, L * (L + 1) // 2))
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    p_mm = np.full(npts, 1.0 / math.sqrt(FOUR_PI))
    for m in range(L):
        if m > 0:
            p_mm = p_mm * (-math.sqrt((2 * m + 1) / (2 * m))) * sin_theta
        col = _tri_offset(m, L)
        out[:, col] = p_mm
        if m + 1 < L:
            p_prev = p_mm
            p_curr = math.sqrt(2 * m + 3) * x * p_mm
            out[:, col + 1] = p_curr
            for l in range(m + 2, L):
                a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
                b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
                p_prev, p_curr = p_curr, a * (x * p_curr - b * p_prev)
                out[:, col + (l - m)] = p_curr
    return out


def ylm_eval(l, m, theta, phi):
    """Evaluate the orthonormal spherical harmonic Y_lm at (theta, phi).

    Accepts scalars or broadcastable arrays; raises ValueError for |m| > l
    or colatitudes outside [0, pi].
    """
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid degree/order (l={l}, m={m})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((theta < 0.0) | (theta > math.pi)):
        raise ValueError("colatitude outside [0, pi]")
    am = abs(m)
    tab = legendre_table(l + 1, np.cos(theta).ravel())
    p = tab[:, _tri_offset(am, l + 1) + (l - am)].reshape(theta.shape)
    sign = 1.0 if m >= 0 else (-1.0) ** am
    out = sign * p * np.exp(1j * m * phi)
    if out.shape == ():
        return complex(out)
    return out


@dataclass(frozen=True)
class GridSpec:
    """Quadrature grid: Gauss-Legendre colatitude rings x equispaced longitudes.

    ``weights`` are per-ring and include the longitude measure, so the sum of
    the weight over every grid sample is 4*pi.
    """

    L: int
    n_theta: int
    n_phi: int
    theta_nodes: np.ndarray
    phi_nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("bandlimit must be >= 1")
        if self.theta_nodes.shape != (self.n_theta,) or self.weights.shape != (self.n_theta,):
            raise ValueError("theta nodes/weights do not match n_theta")
        if self.phi_nodes.shape != (self.n_phi,):
            raise ValueError("phi nodes do not match n_phi")
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")
        total = self.n_phi * float(np.sum(self.weights))
        if abs(total - FOUR_PI) > 1e-12 * FOUR_PI:
            raise ValueError("quadrature weights do not sum to 4*pi")

    @property
    def cos_nodes(self):
        return np.cos(self.theta_nodes)

    def node_arrays(self):
        """Flattened (theta, phi, weight) arrays over all grid samples."""
        t = np.repeat(self.theta_nodes, self.n_phi)
        p = np.tile(self.phi_nodes, self.n_theta)
        w = np.repeat(self.weights, self.n_phi)
        return t, p, w


def make_grid(L):
    """Grid whose quadrature is exact for products of bandlimit-L harmonics."""
    if L < 1:
        raise ValueError("bandlimit must be >= 1")
    x, glw = np.polynomial.legendre.leggauss(L)
    order = np.argsort(-x)  # ascending colatitude
    n_phi = 2 * L
    dphi = 2.0 * math.pi / n_phi
    return GridSpec(
        L=L,
        n_theta=L,
        n_phi=n_phi,
        theta_nodes=np.arccos(np.clip(x[order], -1.0, 1.0)),
        phi_nodes=np.arange(n_phi) * dphi,
        weights=glw[order] * dphi,
    )


@dataclass
class SampledField:
    """Samples of a signal on a quadrature grid, (n_theta, n_phi)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n_theta, self.grid.n_phi):
            raise ValueError("field dimensions do not match grid")


def _reality_residual(values, L):
    ls, ms = zip(*(lm_from_flat(i) for i in range(L * L)))
    ls = np.asarray(ls)
    ms = np.asarray(ms)
    mirror = ls * ls + ls - ms
    signs = (-1.0) ** ms
    return np.abs(np.conj(values) - signs * values[mirror]).max()


@dataclass
class HarmonicCoeffs:
    """Spherical harmonic coefficients, flat order l*l + l + m, l < L."""

    L: int
    values: np.ndarray
    real_field: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.L * self.L,):
            raise ValueError("coefficient vector must hold exactly L^2 entries")
        if self.real_field:
            scale = max(1.0, float(np.abs(self.values).max()))
            if _reality_residual(self.values, self.L) > 1e-12 * scale:
                raise ValueError("coefficients violate the real-field conjugation symmetry")


def forward_sht(field):
    """Project a bandlimited field onto the harmonics under the grid quadrature."""
    grid = field.grid
    L = grid.L
    g = np.fft.fft(np.asarray(field.values, dtype=complex), axis=1)
    g = g * grid.weights[:, None]
    tab = legendre_table(L, grid.cos_nodes)
    out = np.zeros(L * L, dtype=complex)
    for m in range(-(L - 1), L):
        am = abs(m)
        ls = np.arange(am, L)
        cols = _tri_offset(am, L) + (ls - am)
        sign = 1.0 if m >= 0 else (-1.0) ** am
        out[ls * ls + ls + m] = sign * (g[:, m % grid.n_phi] @ tab[:, cols])
    return HarmonicCoeffs(L, out)


def inverse_sht(coeffs, grid):
    """Evaluate sum_lm f_lm Y_lm at every grid node; coeffs.L may be <= grid.L."""
    fields = inverse_sht_stack(coeffs.values[None, :], grid, coeffs.L)
    return SampledField(grid, fields[0])


def inverse_sht_stack(coeff_matrix, grid, L_in=None):
    """Inverse transform of a stack of coefficient vectors, (k, L_in^2) -> (k, n_theta, n_phi)."""
    coeff_matrix = np.asarray(coeff_matrix, dtype=complex)
    if L_in is None:
        L_in = math.isqrt(coeff_matrix.shape[1])
    if L_in > grid.L:
        raise ValueError("coefficient bandlimit exceeds grid bandlimit")
    if coeff_matrix.shape[1] != L_in * L_in:
        raise ValueError("coefficient rows must hold L^2 entries")
    tab = legendre_table(L_in, grid.cos_nodes)
    spec = np.zeros((coeff_matrix.shape[0], grid.n_theta, grid.n_phi), dtype=complex)
    for m in range(-(L_in - 1), L_in):
        am = abs(m)
        ls = np.arange(am, L_in)
        cols = _tri_offset(am, L_in) + (ls - am)
        sign = 1.0 if m >= 0 else (-1.0) ** am
        spec[:, :, m % grid.n_phi] = sign * (coeff_matrix[:, ls * ls + ls + m] @ tab[:, cols].T)
    return np.fft.ifft(spec, axis=2) * grid.n_phi


def eval_field_at(coeffs, thetas, phis):
    """Evaluate a coefficient vector at arbitrary points (not restricted to a grid)."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    L = coeffs.L
    tab = legendre_table(L, np.cos(thetas))
    out = np.zeros(thetas.shape, dtype=complex)
    for m in range(-(L - 1), L):
        am = abs(m)
        ls = np.arange(am, L)
        cols = _tri_offset(am, L) + (ls - am)
        sign = 1.0 if m >= 0 else (-1.0) ** am
        out += sign * (tab[:, cols] @ coeffs.values[ls * ls + ls + m]) * np.exp(1j * m * phis)
    return out


def harmonics_matrix(L, thetas, phis):
    """Matrix of Y_lm values, shape (n_points, L^2), columns in flat order."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    tab = legendre_table(L, np.cos(thetas))
    out = np.empty((thetas.size, L * L), dtype=complex)
    for m in range(-(L - 1), L):
        am = abs(m)
        ls = np.arange(am, L)
        cols = _tri_offset(am, L) + (ls - am)
        sign = 1.0 if m >= 0 else (-1.0) ** am
        out[:, ls * ls + ls + m] = sign * tab[:, cols] * np.exp(1j * m * phis)[:, None]
    return out
