"""Slepian functions and scale-discretised wavelets for region-limited spherical signals."""

from .errors import DataError, NumericalError
from .sphere import (
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
from .slepian import (
    ConcentrationMatrix,
    Region,
    SlepianBasis,
    SlepianCoeffs,
    assemble_k_matrix,
    build_region,
    harmonic_to_slepian,
    region_restricted_analysis,
    shannon_number,
    slepian_analysis,
    slepian_synthesis,
    slepian_to_harmonic,
    solve_eigenproblem,
)
from .sifting import BasisHandle, harmonic_handle, sift_convolve, slepian_handle, translate_coeffs
from .wavelets import (
    FilterBank,
    TilingParams,
    WaveletCoefficients,
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
from .denoise import (
    NoiseModel,
    ThresholdField,
    add_white_noise,
    denoise_pipeline,
    hard_threshold,
    snr,
    target_snr_sigma,
    wavelet_noise_std,
)

__version__ = "0.1.0"
