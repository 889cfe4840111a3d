"""Coefficient dataset ingestion, harmonic smoothing, and synthetic stand-ins."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fileio import read_coeffs
from .sphere import HarmonicCoeffs


@dataclass
class CoeffDataset:
    """A named harmonic coefficient set, optionally Gaussian-smoothed."""

    name: str
    coeffs: HarmonicCoeffs
    fwhm: float | None = None  # radians


def gaussian_smooth(coeffs, fwhm):
    """Attenuate f_lm by exp(-l(l+1) s^2 / 2) with s = fwhm / sqrt(8 ln 2)."""
    if not fwhm > 0.0:
        raise ValueError("FWHM must be positive")
    s = fwhm / math.sqrt(8.0 * math.log(2.0))
    ls = np.floor(np.sqrt(np.arange(coeffs.L**2)))
    kernel = np.exp(-ls * (ls + 1.0) * s * s / 2.0)
    return HarmonicCoeffs(coeffs.L, coeffs.values * kernel)


def ingest_coeffs(path, fwhm=None, name=None):
    """Load a coefficient file, applying optional Gaussian smoothing."""
    coeffs = read_coeffs(path)
    if fwhm is not None:
        coeffs = gaussian_smooth(coeffs, fwhm)
    return CoeffDataset(name=name or str(path), coeffs=coeffs, fwhm=fwhm)


def synthetic_topography(L, seed, slope=2.5, amplitude=1.0):
    """Seeded band-power-decaying random real field, a desk-scale dataset stand-in.

    Degree powers fall off as (1 + l)^-slope; the conjugation symmetry of a
    real field is imposed, so an inverse transform yields a real-valued map.
    """
    if L < 1:
        raise ValueError("bandlimit must be >= 1")
    rng = np.random.default_rng(seed)
    values = np.zeros(L * L, dtype=complex)
    for l in range(L):
        cl = amplitude**2 * (1.0 + l) ** (-slope)
        values[l * l + l] = rng.normal(scale=math.sqrt(cl))
        for m in range(1, l + 1):
            re, im = rng.normal(scale=math.sqrt(cl / 2.0), size=2)
            values[l * l + l + m] = re + 1j * im
            values[l * l + l - m] = (-1.0) ** m * (re - 1j * im)
    return HarmonicCoeffs(L, values, real_field=True)
