"""White noise in the Slepian basis, wavelet-domain thresholds, and denoising.

White noise with flat power sigma^2 in harmonic space stays white with the
same power in the Slepian basis (the change of basis is unitary), but the
variance of a filtered field depends on position:

    Var[W(omega)] = sigma^2 * sum_p |filter_p|^2 |S_p(omega)|^2

Hard thresholding compares each rendered coefficient field against a
multiple of that position-dependent standard deviation.  The threshold
compares magnitudes |X(omega)|: a signed comparison would keep every large
negative excursion, which defeats the point of removing noise.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .slepian import SlepianCoeffs, harmonic_to_slepian, render_basis_fields
from .sphere import SampledField, forward_sht
from .wavelets import WaveletCoefficients, wavelet_analysis, wavelet_synthesis

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean white noise of standard deviation sigma per coefficient.

    The seed fully determines the generated noise: two calls with the same
    model produce identical output.
    """

    sigma: float
    seed: int
    kind: str = "white"

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")
        if self.kind != "white":
            raise ValueError(f"unknown noise kind {self.kind!r}")


def add_white_noise(coeffs, model):
    """x_p = s_p + n_p, n_p i.i.d. Gaussian with std sigma.

    Real coefficient vectors get real noise; complex vectors get circular
    complex noise (E|n_p|^2 = sigma^2 either way).
    """
    rng = np.random.default_rng(model.seed)
    values = np.asarray(coeffs.values)
    if np.iscomplexobj(values):
        half = model.sigma / math.sqrt(2.0)
        noise = rng.normal(scale=half, size=values.size) + 1j * rng.normal(
            scale=half, size=values.size
        )
    else:
        noise = rng.normal(scale=model.sigma, size=values.size)
    return SlepianCoeffs(coeffs.L, values + noise)


def target_snr_sigma(coeffs, snr_db):
    """Noise std giving an expected signal-to-noise ratio of snr_db decibels."""
    energy = float(np.sum(np.abs(coeffs.values) ** 2))
    if energy == 0.0:
        raise ValueError("cannot target an SNR for a zero signal")
    return math.sqrt(energy / (coeffs.P * 10.0 ** (snr_db / 10.0)))


def wavelet_noise_std(model, filter_values, basis, grid, fields=None):
    """Position-dependent noise std of a filtered field.

    ``fields`` may carry pre-rendered eigenfunction samples
    (len(filter_values), n_theta, n_phi) to avoid re-rendering per filter.
    """
    filt = np.asarray(filter_values)
    if filt.size > basis.n_harmonic:
        raise ValueError("filter length exceeds basis size")
    if fields is None:
        fields = render_basis_fields(basis, grid, filt.size)
    if fields.shape != (filt.size, grid.n_theta, grid.n_phi):
        raise ValueError("rendered fields do not match filter length and grid")
    var = model.sigma**2 * np.einsum("p,pij->ij", np.abs(filt) ** 2, np.abs(fields) ** 2)
    return SampledField(grid, np.sqrt(var))


@dataclass(frozen=True)
class ThresholdField:
    """Per-scale threshold fields T(omega) = n_sigma * sigma_filter(omega)."""

    n_sigma: float
    labels: tuple
    fields: tuple

    def __post_init__(self):
        if self.n_sigma < 0.0:
            raise ValueError("n_sigma must be non-negative")
        if len(self.labels) != len(self.fields):
            raise ValueError("labels and fields differ in length")
        for f in self.fields:
            if np.any(f.values.real < 0.0) or np.any(f.values.imag != 0.0):
                raise ValueError("threshold fields must be real and non-negative")


def build_threshold(model, bank, basis, grid, n_sigma, fields=None):
    """Threshold fields for every filter in the bank."""
    if fields is None:
        fields = render_basis_fields(basis, grid, bank.params.p_max)
    labels, thresholds = [], []
    for label, filt in bank.labelled_filters():
        std = wavelet_noise_std(model, filt, basis, grid, fields=fields)
        labels.append(label)
        thresholds.append(SampledField(grid, n_sigma * std.values.real))
    return ThresholdField(n_sigma, tuple(labels), tuple(thresholds))


def hard_threshold(fields, threshold):
    """Zero each field where |X(omega)| < T(omega); keep it unchanged elsewhere."""
    if len(fields) != len(threshold.fields):
        raise ValueError("field count does not match threshold")
    out = []
    for X, T in zip(fields, threshold.fields):
        if X.values.shape != T.values.shape or X.grid.L != T.grid.L:
            raise ValueError("field and threshold grids do not match")
        keep = np.abs(X.values) >= T.values.real
        out.append(SampledField(X.grid, np.where(keep, X.values, 0.0)))
    return out


def snr(x, s):
    """10 log10 of signal energy over residual energy, in decibels.

    Returns +inf when x equals s exactly (the ratio is undefined).
    """
    if x.P != s.P:
        raise ValueError("coefficient vectors differ in length")
    num = float(np.sum(np.abs(s.values) ** 2))
    den = float(np.sum(np.abs(np.asarray(x.values) - np.asarray(s.values)) ** 2))
    if den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


def denoise_pipeline(x, bank, basis, model, n_sigma, grid, stats=None):
    """Analyse, threshold the rendered coefficient fields, and resynthesise.

    The scaling function is treated exactly like the wavelets.  Thresholded
    fields leave the rendered span pointwise, so they are projected back to
    Slepian coefficients through the forward spherical harmonic transform.
    With n_sigma = 0 the pipeline is the identity.  ``stats``, if a dict,
    is filled with per-scale kept fractions, threshold RMS values and keep
    masks.
    """
    P = bank.params.p_max
    wav = wavelet_analysis(x, bank)
    fields = render_basis_fields(basis, grid, P)
    coeff_sets = [("scaling", wav.scaling)] + [
        (f"j{j}", wav.wavelets[i]) for i, j in enumerate(bank.params.j_values)
    ]
    threshold = build_threshold(model, bank, basis, grid, n_sigma, fields=fields)
    rendered = [
        SampledField(grid, np.einsum("p,pij->ij", w, fields)) for _, w in coeff_sets
    ]
    kept_fields = hard_threshold(rendered, threshold)
    new_blocks = []
    for (label, _), field, T, D in zip(coeff_sets, rendered, threshold.fields, kept_fields):
        projected = harmonic_to_slepian(forward_sht(D), basis, truncation=P)
        new_blocks.append(projected.values)
        if stats is not None:
            keep = np.abs(field.values) >= T.values.real
            stats.setdefault("kept_fraction", {})[label] = float(keep.mean())
            stats.setdefault("threshold_rms", {})[label] = float(
                np.sqrt(np.mean(T.values.real**2))
            )
            stats.setdefault("kept_mask", {})[label] = keep
    thresholded = WaveletCoefficients(
        L=x.L,
        params=bank.params,
        scaling=new_blocks[0],
        wavelets=np.stack(new_blocks[1:]),
    )
    return wavelet_synthesis(thresholded, bank)
