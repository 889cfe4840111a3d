"""Spatial-spectral concentration on a sphere region.

Builds the concentration matrix of a region, solves its Hermitian
eigenproblem for the Slepian functions, and converts signals between the
harmonic, Slepian and spatial representations.

A region is either an analytic polar cap centred on the north pole or a
boolean mask on a quadrature grid.  Cap integrals are evaluated with
Gauss-Legendre nodes remapped onto [cos(opening), 1], which is exact for
products of bandlimited harmonics; mask integrals use the masked grid
quadrature.  The same region quadrature backs the concentration matrix,
the region-restricted analysis and the region-orthogonality checks, so the
three stay mutually consistent.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .errors import NumericalError
from .sphere import (
    FOUR_PI,
    GridSpec,
    HarmonicCoeffs,
    SampledField,
    _tri_offset,
    forward_sht,
    harmonics_matrix,
    inverse_sht,
    inverse_sht_stack,
    legendre_table,
)

log = logging.getLogger(__name__)

# eigenvalues are clamped into (CLAMP_EPS, 1 - CLAMP_EPS); quadrature noise may
# push them marginally outside (0, 1) despite positive definiteness
CLAMP_EPS = 1e-14
EIG_RANGE_TOL = 1e-10
DEGENERACY_TOL = 1e-9
DEFAULT_MU_FLOOR = 1e-6


@dataclass(frozen=True)
class Region:
    """A subset of the sphere: analytic north-polar cap or gridded mask."""

    kind: str  # "polar_cap" | "grid_mask"
    area: float
    opening: float | None = None
    center: tuple = (0.0, 0.0)
    mask: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("polar_cap", "grid_mask"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        # full-sphere masks sit exactly at 4*pi, so the upper bound is inclusive
        if not 0.0 < self.area <= FOUR_PI * (1.0 + 1e-12):
            raise ValueError("region area outside (0, 4*pi]")
        if self.kind == "polar_cap":
            if self.opening is None or not 0.0 < self.opening < math.pi:
                raise ValueError("cap opening outside (0, pi)")
        elif self.mask is None or not self.mask.any():
            raise ValueError("empty region mask")


def cap_membership(opening, center_theta, center_phi, thetas, phis):
    """Boolean membership of points in a spherical cap (angular distance test)."""
    cos_gamma = math.cos(center_theta) * np.cos(thetas) + math.sin(center_theta) * np.sin(
        thetas
    ) * np.cos(phis - center_phi)
    return cos_gamma >= math.cos(opening)


def _mask_region(mask, grid):
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (grid.n_theta, grid.n_phi):
        raise ValueError("mask dimensions do not match grid")
    if not mask.any():
        raise ValueError("empty region mask")
    area = float(np.sum(mask.sum(axis=1) * grid.weights))
    return Region(kind="grid_mask", area=area, mask=mask)


def build_region(spec, grid=None, threshold=None):
    """Build a Region from a config mapping (angles in radians).

    ``spec`` keys: ``kind`` in {polar_cap, grid_mask, full_sphere}; polar caps
    take ``opening`` plus optional ``center_theta``/``center_phi``; grid_mask
    takes a boolean ``mask`` matching the grid.  ``threshold`` (SampledField
    or real array on the grid) restricts cap membership to samples where the
    field is positive.  Caps that are off the north pole, thresholded, or of
    kind full_sphere are rasterised onto the grid.
    """
    kind = spec["kind"]
    if kind == "polar_cap":
        opening = float(spec["opening"])
        if not 0.0 < opening < math.pi:
            raise ValueError("cap opening outside (0, pi)")
        tc = float(spec.get("center_theta", 0.0))
        pc = float(spec.get("center_phi", 0.0))
        if abs(tc) < 1e-12 and threshold is None:
            return Region(
                kind="polar_cap",
                area=2.0 * math.pi * (1.0 - math.cos(opening)),
                opening=opening,
            )
        if grid is None:
            raise ValueError("off-pole or thresholded caps need a grid to rasterise on")
        tt, pp = np.meshgrid(grid.theta_nodes, grid.phi_nodes, indexing="ij")
        inside = cap_membership(opening, tc, pc, tt, pp)
        if threshold is not None:
            vals = threshold.values if isinstance(threshold, SampledField) else np.asarray(threshold)
            inside = inside & (vals.real > 0.0)
        return _mask_region(inside, grid)
    if kind == "full_sphere":
        if grid is None:
            raise ValueError("full-sphere region needs a grid")
        return _mask_region(np.ones((grid.n_theta, grid.n_phi), dtype=bool), grid)
    if kind == "grid_mask":
        if grid is None:
            raise ValueError("grid_mask region needs a grid")
        return _mask_region(spec["mask"], grid)
    raise ValueError(f"unknown region kind {kind!r}")


def region_quadrature(region, grid):
    """Quadrature nodes and weights covering the region.

    Returns flat arrays (thetas, phis, weights).  For an analytic cap the
    colatitude nodes are Gauss-Legendre on [cos(opening), 1], exact for
    bandlimited integrands; for a mask they are the masked grid samples.
    """
    if region.kind == "polar_cap":
        xs, ws = np.polynomial.legendre.leggauss(grid.L)
        half = 0.5 * (1.0 - math.cos(region.opening))
        x = math.cos(region.opening) + half * (xs + 1.0)
        thetas = np.arccos(np.clip(x, -1.0, 1.0))
        dphi = 2.0 * math.pi / grid.n_phi
        t = np.repeat(thetas, grid.n_phi)
        p = np.tile(grid.phi_nodes, grid.L)
        w = np.repeat(ws * half * dphi, grid.n_phi)
        return t, p, w
    t, p, w = grid.node_arrays()
    sel = region.mask.ravel()
    return t[sel], p[sel], w[sel]


def shannon_number(region, L):
    """Effective count of well-concentrated basis functions, (A / 4*pi) * L^2."""
    return region.area / FOUR_PI * L * L


@dataclass
class ConcentrationMatrix:
    """Dense Hermitian L^2 x L^2 concentration matrix in flat (l, m) indexing."""

    L: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.L * self.L
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (n, n):
            raise ValueError("concentration matrix must be L^2 x L^2")
        if np.abs(self.matrix - self.matrix.conj().T).max() >= 1e-12:
            raise ValueError("concentration matrix is not Hermitian")


def assemble_k_matrix(region, grid, chunk=4096):
    """Gram matrix of the harmonics over the region under its quadrature.

    Analytic caps are assembled order-by-order (the longitude integral is
    2*pi for m == m' and zero otherwise), giving exact zeros off the
    m-blocks; masks accumulate the weighted outer products of the harmonics
    over the masked samples in chunks.
    """
    L = grid.L
    n = L * L
    if region.kind == "polar_cap":
        xs, ws = np.polynomial.legendre.leggauss(L)
        half = 0.5 * (1.0 - math.cos(region.opening))
        x = math.cos(region.opening) + half * (xs + 1.0)
        wx = ws * half
        tab = legendre_table(L, x)
        K = np.zeros((n, n), dtype=complex)
        for m in range(-(L - 1), L):
            am = abs(m)
            ls = np.arange(am, L)
            cols = _tri_offset(am, L) + (ls - am)
            P = tab[:, cols]
            idx = ls * ls + ls + m
            K[np.ix_(idx, idx)] = 2.0 * math.pi * ((P * wx[:, None]).T @ P)
    else:
        tq, pq, wq = region_quadrature(region, grid)
        K = np.zeros((n, n), dtype=complex)
        for start in range(0, tq.size, chunk):
            stop = start + chunk
            Y = harmonics_matrix(L, tq[start:stop], pq[start:stop])
            K += (Y * wq[start:stop, None]).T @ np.conj(Y)
    K = 0.5 * (K + K.conj().T)
    return ConcentrationMatrix(L, K)


@dataclass
class SlepianBasis:
    """Concentration eigenbasis: eigenvalues descending, eigenvectors as rows."""

    L: int
    region: Region | None
    eigenvalues: np.ndarray
    vectors: np.ndarray
    shannon: float

    def __post_init__(self):
        n = self.L * self.L
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.vectors = np.asarray(self.vectors, dtype=complex)
        if self.eigenvalues.shape != (n,) or self.vectors.shape != (n, n):
            raise ValueError("basis arrays do not match the bandlimit")

    @property
    def n_harmonic(self):
        return self.L * self.L

    @property
    def truncation_default(self):
        """Ceiling of the Shannon number, the region-limited truncation."""
        return min(self.n_harmonic, max(1, math.ceil(self.shannon - 1e-9)))


def _reorder_degenerate(eigenvalues, vectors):
    """Order a degenerate cluster by the flat index of each vector's dominant entry.

    Cluster members (consecutive gaps below ``DEGENERACY_TOL``) are snapped to
    their mean, which keeps the sequence non-increasing after the reorder and
    preserves the eigenvalue sum; the spread inside a cluster is solver noise.
    """
    n = eigenvalues.size
    order = np.arange(n)
    snapped = eigenvalues.copy()
    i = 0
    while i < n:
        j = i + 1
        while j < n and eigenvalues[j - 1] - eigenvalues[j] < DEGENERACY_TOL:
            j += 1
        if j - i > 1:
            dominant = [int(np.argmax(np.abs(vectors[p]))) for p in order[i:j]]
            order[i:j] = order[i:j][np.argsort(dominant, kind="stable")]
            snapped[i:j] = eigenvalues[i:j].mean()
        i = j
    return order, snapped


def solve_eigenproblem(K, region=None):
    """Full Hermitian eigendecomposition of the concentration matrix.

    Zero blocks of the matrix (for axisymmetric caps: one block per order m)
    are detected and solved independently, which keeps degenerate eigenvector
    pairs from mixing across blocks.  Eigenvalues are sorted descending,
    clamped strictly inside (0, 1), and each eigenvector is scaled by the
    unit phase making its largest component real and positive.
    """
    A = K.matrix
    n = A.shape[0]
    absmax = float(np.abs(A).max())
    tol = 1e-12 * max(absmax, 1e-30)
    graph = scipy.sparse.csr_matrix(np.abs(A) > tol)
    n_comp, labels = connected_components(graph, directed=False)
    eigenvalues = np.empty(n)
    vectors = np.zeros((n, n), dtype=complex)
    pos = 0
    for comp in range(n_comp):
        idx = np.flatnonzero(labels == comp)
        sub = A[np.ix_(idx, idx)]
        if np.abs(sub.imag).max() < tol:
            sub = sub.real
        try:
            w, v = scipy.linalg.eigh(sub)
        except scipy.linalg.LinAlgError as exc:
            raise NumericalError(
                "eigensolver failed to converge "
                f"(block size {idx.size}, max |entry| {np.abs(sub).max():.3e}, "
                f"hermiticity residual {np.abs(sub - np.conj(sub).T).max():.3e})"
            ) from exc
        eigenvalues[pos : pos + idx.size] = w
        vectors[pos : pos + idx.size][:, idx] = v.T
        pos += idx.size
    if eigenvalues.min() <= -EIG_RANGE_TOL or eigenvalues.max() >= 1.0 + EIG_RANGE_TOL:
        raise NumericalError(
            f"eigenvalues outside (-{EIG_RANGE_TOL}, 1 + {EIG_RANGE_TOL}): "
            f"range [{eigenvalues.min():.3e}, {eigenvalues.max():.3e}]"
        )
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[order]
    order, eigenvalues = _reorder_degenerate(eigenvalues, vectors)
    eigenvalues = np.clip(eigenvalues, CLAMP_EPS, 1.0 - CLAMP_EPS)
    vectors = vectors[order]
    for p in range(n):
        k = int(np.argmax(np.abs(vectors[p])))
        pivot = vectors[p, k]
        vectors[p] *= np.conj(pivot) / abs(pivot)
    shannon = shannon_number(region, K.L) if region is not None else float(np.trace(A).real)
    return SlepianBasis(K.L, region, eigenvalues, vectors, shannon)


@dataclass
class SlepianCoeffs:
    """Coefficients in the concentration eigenbasis, p = 1..P (stored 0-based)."""

    L: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("coefficients must form a non-empty vector")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")

    @property
    def P(self):
        return self.values.size


def _truncation(basis, truncation):
    P = basis.truncation_default if truncation is None else int(truncation)
    if not 1 <= P <= basis.n_harmonic:
        raise ValueError("truncation outside 1..L^2")
    return P


def render_basis_fields(basis, grid, count=None):
    """Sample the leading eigenfunctions on the grid, (count, n_theta, n_phi)."""
    count = _truncation(basis, count)
    return inverse_sht_stack(basis.vectors[:count], grid, basis.L)


def slepian_synthesis(coeffs, basis, grid):
    """Field sum_p f_p S_p(omega) on the grid."""
    if coeffs.P > basis.n_harmonic:
        raise ValueError("truncation exceeds basis size")
    a = coeffs.values @ basis.vectors[: coeffs.P]
    return inverse_sht(HarmonicCoeffs(basis.L, a), grid)


def slepian_analysis(field, basis, truncation=None):
    """Projection <f, S_p> computed in harmonic space."""
    if field.grid.L != basis.L:
        raise ValueError("field bandlimit does not match basis")
    P = _truncation(basis, truncation)
    a = forward_sht(field)
    return SlepianCoeffs(basis.L, basis.vectors[:P].conj() @ a.values)


def harmonic_to_slepian(coeffs, basis, truncation=None):
    """Change of basis f_p = sum_lm f_lm conj((S_p)_lm)."""
    if coeffs.L != basis.L:
        raise ValueError("bandlimit mismatch")
    P = _truncation(basis, truncation)
    return SlepianCoeffs(basis.L, basis.vectors[:P].conj() @ coeffs.values)


def slepian_to_harmonic(coeffs, basis):
    """Change of basis f_lm = sum_p f_p (S_p)_lm."""
    if coeffs.P > basis.n_harmonic:
        raise ValueError("truncation exceeds basis size")
    return HarmonicCoeffs(basis.L, coeffs.values @ basis.vectors[: coeffs.P])


def region_restricted_analysis(field, basis, grid, mu_floor=DEFAULT_MU_FLOOR, truncation=None):
    """Coefficients from the region integral alone, f_p = (1/mu_p) int_R f conj(S_p).

    Coefficients whose eigenvalue falls below ``mu_floor`` are zeroed (the
    1/mu_p factor would amplify leakage noise unboundedly) and the skip count
    is logged.
    """
    if basis.region is None:
        raise ValueError("basis carries no region")
    if field.grid.L != basis.L:
        raise ValueError("field bandlimit does not match basis")
    if not 0.0 < mu_floor < 1.0:
        raise ValueError("mu_floor outside (0, 1)")
    P = _truncation(basis, truncation)
    a = forward_sht(field)
    tq, pq, wq = region_quadrature(basis.region, grid)
    Y = harmonics_matrix(basis.L, tq, pq)
    f_nodes = Y @ a.values
    s_nodes = Y @ basis.vectors[:P].T
    raw = (wq * f_nodes) @ np.conj(s_nodes)
    mu = basis.eigenvalues[:P]
    keep = mu >= mu_floor
    if not keep.all():
        log.info("region-restricted analysis skipped %d coefficients below mu_floor=%g",
                 int((~keep).sum()), mu_floor)
    values = np.where(keep, raw / mu, 0.0 + 0.0j)
    return SlepianCoeffs(basis.L, values)
