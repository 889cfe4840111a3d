"""Sifting convolution: translation as a product of basis-function values.

The translation of a basis function is defined by (T_w' B_k)(w) =
B_k(w') B_k(w), mirroring the exponent rule of the Euclidean complex
exponentials, and the induced convolution reduces to the entrywise product
f_k conj(g_k) in coefficient space.  The construction is generic over an
orthonormal basis: the spherical harmonics at a bandlimit, or a truncated
Slepian basis of a region.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .slepian import SlepianBasis
from .sphere import harmonics_matrix


@dataclass(frozen=True)
class BasisHandle:
    """An orthonormal basis to translate and convolve against."""

    kind: str  # "harmonic" | "slepian"
    L: int
    basis: SlepianBasis | None = None
    truncation: int | None = None

    def __post_init__(self):
        if self.kind not in ("harmonic", "slepian"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == "slepian":
            if self.basis is None:
                raise ValueError("slepian handle needs a SlepianBasis")
            if not 1 <= self.n_coeffs <= self.basis.n_harmonic:
                raise ValueError("truncation outside 1..L^2")

    @property
    def n_coeffs(self):
        if self.kind == "harmonic":
            return self.L * self.L
        if self.truncation is not None:
            return int(self.truncation)
        return self.basis.truncation_default

    def functions_at(self, thetas, phis):
        """Basis function values at the given points, shape (n_points, n_coeffs)."""
        Y = harmonics_matrix(self.L, thetas, phis)
        if self.kind == "harmonic":
            return Y
        return Y @ self.basis.vectors[: self.n_coeffs].T


def harmonic_handle(L):
    return BasisHandle(kind="harmonic", L=L)


def slepian_handle(basis, truncation=None):
    return BasisHandle(kind="slepian", L=basis.L, basis=basis, truncation=truncation)


def translate_coeffs(coeffs, omega_prime, handle):
    """Coefficients of the translated signal: c_k * B_k(omega')."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (handle.n_coeffs,):
        raise ValueError("coefficient length does not match basis")
    theta, phi = omega_prime
    return coeffs * handle.functions_at(theta, phi)[0]


def sift_convolve(f, g, handle=None):
    """Entrywise sifting convolution (f . g)_k = f_k * conj(g_k)."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValueError("coefficient vectors differ in length")
    if handle is not None and f.shape != (handle.n_coeffs,):
        raise ValueError("coefficient length does not match basis")
    return f * np.conj(g)
