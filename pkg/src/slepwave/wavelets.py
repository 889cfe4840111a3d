"""Scale-discretised tiling of the (1-based) Slepian index line.

A smooth bump with compact support is squeezed into [1/lambda, 1], turned
into a smoothly decreasing plateau function k_lambda by integration, and
differenced across scales; the squared filters then telescope to one, which
is what makes the wavelet transform exactly invertible.  Filters are real.

k_lambda has no closed form; its integrals are evaluated by adaptive
quadrature and memoised, so a given argument always yields the identical
float and the telescoping survives in floating point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import NumericalError
from .slepian import SlepianCoeffs

log = logging.getLogger(__name__)

ADMISSIBILITY_TOL = 1e-10


def _as_float_array(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


def _scalar_like(out, t):
    return float(out[0]) if np.isscalar(t) or np.ndim(t) == 0 else out


def schwartz_s(t):
    """Infinitely differentiable bump exp(1/(t^2 - 1)) on (-1, 1), zero outside."""
    arr = _as_float_array(t)
    out = np.zeros(arr.shape)
    inside = np.abs(arr) < 1.0
    out[inside] = np.exp(1.0 / (arr[inside] ** 2 - 1.0))
    return _scalar_like(out, t)


def _check_lam(lam):
    if not lam > 1.0:
        raise ValueError("lambda must exceed 1")


def s_lambda(t, lam):
    """The bump remapped to compact support on [1/lambda, 1]."""
    _check_lam(lam)
    arr = _as_float_array(t)
    out = schwartz_s(2.0 * lam / (lam - 1.0) * (arr - 1.0 / lam) - 1.0)
    return _scalar_like(np.atleast_1d(out), t)


@lru_cache(maxsize=None)
def _k_denominator(lam):
    val, _ = integrate.quad(
        lambda u: s_lambda(u, lam) ** 2 / u, 1.0 / lam, 1.0,
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    if not (np.isfinite(val) and val > 0.0):
        raise NumericalError("generating-function normalisation integral failed")
    return val


@lru_cache(maxsize=None)
def _k_scalar(t, lam):
    if t <= 1.0 / lam:
        return 1.0
    if t >= 1.0:
        return 0.0
    num, _ = integrate.quad(
        lambda u: s_lambda(u, lam) ** 2 / u, t, 1.0,
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    if not np.isfinite(num):
        raise NumericalError(f"generating-function integral failed at t={t}")
    return min(max(num / _k_denominator(lam), 0.0), 1.0)


def k_lambda(t, lam):
    """Smooth plateau: 1 below 1/lambda, 0 above 1, decreasing in between."""
    _check_lam(lam)
    arr = _as_float_array(t)
    out = np.fromiter((_k_scalar(float(v), float(lam)) for v in arr), dtype=float,
                      count=arr.size).reshape(arr.shape)
    return _scalar_like(out, t)


def kappa_lambda(t, lam):
    """Wavelet generating function sqrt(k(t/lambda) - k(t)), clamped at zero."""
    _check_lam(lam)
    arr = _as_float_array(t)
    diff = k_lambda(arr / lam, lam) - k_lambda(arr, lam)
    out = np.sqrt(np.maximum(diff, 0.0))
    return _scalar_like(out, t)


def eta_lambda(t, lam):
    """Scaling-function generating function sqrt(k(t))."""
    _check_lam(lam)
    arr = _as_float_array(t)
    out = np.sqrt(k_lambda(arr, lam))
    return _scalar_like(out, t)


@dataclass(frozen=True)
class TilingParams:
    """Tiling of indices 1..p_max with scales j0..J, J minimal with lambda^J >= p_max."""

    lam: float
    j0: int
    p_max: int

    def __post_init__(self):
        if not self.lam > 1.0:
            raise ValueError("lambda must exceed 1")
        if self.p_max < 1:
            raise ValueError("tiling domain must be non-empty")
        if not 0 <= self.j0 < self.j_max:
            raise ValueError("need 0 <= J0 < J")

    @property
    def j_max(self):
        j, v = 0, 1.0
        while v < self.p_max:
            j += 1
            v *= self.lam
        return j

    @property
    def j_values(self):
        return tuple(range(self.j0, self.j_max + 1))


@dataclass
class FilterBank:
    """Scaling filter plus one wavelet filter per scale, all real, length p_max."""

    params: TilingParams
    scaling: np.ndarray
    wavelets: np.ndarray  # (n_scales, p_max), rows ordered j0..J

    def __post_init__(self):
        P = self.params.p_max
        self.scaling = np.asarray(self.scaling, dtype=float)
        self.wavelets = np.asarray(self.wavelets, dtype=float)
        if self.scaling.shape != (P,):
            raise ValueError("scaling filter length does not match p_max")
        if self.wavelets.shape != (len(self.params.j_values), P):
            raise ValueError("wavelet filter block does not match the scale range")

    @property
    def j_values(self):
        return self.params.j_values

    def admissibility_residual(self):
        total = self.scaling**2 + (self.wavelets**2).sum(axis=0)
        return float(np.abs(total - 1.0).max())

    def labelled_filters(self):
        """Pairs (label, filter) for the scaling function and each wavelet scale."""
        yield "scaling", self.scaling
        for j, row in zip(self.params.j_values, self.wavelets):
            yield f"j{j}", row


def build_filter_bank(params):
    """Evaluate the generating functions on the index line and verify the tiling."""
    p = np.arange(1, params.p_max + 1, dtype=float)
    scaling = eta_lambda(p / params.lam**params.j0, params.lam)
    wavelets = np.stack([kappa_lambda(p / params.lam**j, params.lam) for j in params.j_values])
    bank = FilterBank(params, scaling, wavelets)
    residual = bank.admissibility_residual()
    if residual > ADMISSIBILITY_TOL:
        raise NumericalError(f"tiling admissibility residual {residual:.3e} exceeds tolerance")
    return bank


@dataclass
class WaveletCoefficients:
    """Scaling and per-scale wavelet coefficients in the Slepian representation."""

    L: int
    params: TilingParams
    scaling: np.ndarray
    wavelets: np.ndarray  # (n_scales, p_max)
    rendered: dict | None = None  # optional sampled-field renderings, keyed by label

    def __post_init__(self):
        P = self.params.p_max
        self.scaling = np.asarray(self.scaling)
        self.wavelets = np.asarray(self.wavelets)
        if self.scaling.shape != (P,) or self.wavelets.shape != (len(self.params.j_values), P):
            raise ValueError("coefficient blocks do not match the tiling")


def wavelet_analysis(coeffs, bank):
    """Per-scale entrywise products W_p = filter_p * conj(f_p).

    The input must supply at least p_max coefficients; any beyond p_max fall
    outside the tiling domain and are dropped with a log note (synthesis
    reconstructs indices p <= p_max only).
    """
    P = bank.params.p_max
    values = np.asarray(coeffs.values)
    if values.size < P:
        raise ValueError("need at least p_max coefficients")
    if values.size > P:
        dropped = float(np.sum(np.abs(values[P:]) ** 2))
        log.info("wavelet analysis dropped %d coefficients above p_max (energy %.3e)",
                 values.size - P, dropped)
        values = values[:P]
    fc = np.conj(values)
    return WaveletCoefficients(
        L=coeffs.L,
        params=bank.params,
        scaling=bank.scaling * fc,
        wavelets=bank.wavelets * fc[None, :],
    )


def wavelet_synthesis(wav, bank):
    """Exact reconstruction f_p = Phi_p conj(W^Phi_p) + sum_j Psi^j_p conj(W^j_p)."""
    if wav.params != bank.params:
        raise ValueError("coefficients and bank disagree on the scale range")
    values = bank.scaling * np.conj(wav.scaling)
    values = values + (bank.wavelets * np.conj(wav.wavelets)).sum(axis=0)
    return SlepianCoeffs(wav.L, values)


def wavelet_energy(filter_values, basis=None):
    """Energy sum_p |filter_p|^2; equals the spatial norm of the rendered filter."""
    v = np.asarray(filter_values)
    if basis is not None and v.size > basis.n_harmonic:
        raise ValueError("filter length exceeds basis size")
    return float(np.sum(np.abs(v) ** 2))
