"""Text formats shared across the command-line tools.

All floating-point values are written with ``repr``, whose shortest-digit
output round-trips to the identical float, so every emitted file re-parses
to the in-memory object bit-identically.

Formats:

* coefficient file  -- header ``# L=<int>``, then ``l m re im`` per entry;
* field grid file   -- header ``# L=<int> n_theta=<int> n_phi=<int>``, then
  one row per colatitude ring of ``re im`` pairs (theta-major);
* filter dump       -- header ``# lambda=<f> J0=<int> J=<int> Pmax=<int>``,
  then ``p value`` lines (``p re im`` for complex coefficient sets);
* basis cache       -- header ``# L=<int> region=<hash> N=<float>``, then
  per-p blocks of ``p mu`` followed by L^2 ``l m re im`` eigenvector lines;
* key=value files   -- flat configs and reports, one pair per line.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .errors import DataError
from .slepian import SlepianBasis
from .sphere import HarmonicCoeffs, SampledField, lm_from_flat, make_grid
from .wavelets import TilingParams


def _fmt(x):
    return repr(float(x))


def _parse_header(line, path, expected_keys):
    if not line.startswith("#"):
        raise DataError(f"{path}:1: missing header line")
    fields = {}
    for token in line[1:].split():
        if "=" not in token:
            raise DataError(f"{path}:1: malformed header token {token!r}")
        key, value = token.split("=", 1)
        fields[key] = value
    for key in expected_keys:
        if key not in fields:
            raise DataError(f"{path}:1: header missing {key}=")
    return fields


# -- harmonic coefficient files ------------------------------------------------

def write_coeffs(path, coeffs):
    with open(path, "w") as fh:
        fh.write(f"# L={coeffs.L}\n")
        for idx, v in enumerate(coeffs.values):
            l, m = lm_from_flat(idx)
            fh.write(f"{l} {m} {_fmt(v.real)} {_fmt(v.imag)}\n")


def read_coeffs(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataError(f"{path}:1: empty file")
    header = _parse_header(lines[0], path, ["L"])
    try:
        L = int(header["L"])
    except ValueError:
        raise DataError(f"{path}:1: bandlimit is not an integer") from None
    if L < 1:
        raise DataError(f"{path}:1: bandlimit must be >= 1")
    values = np.zeros(L * L, dtype=complex)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 4:
            raise DataError(f"{path}:{lineno}: expected 'l m re im'")
        try:
            l, m = int(tokens[0]), int(tokens[1])
            re, im = float(tokens[2]), float(tokens[3])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed number") from None
        if l >= L:
            raise DataError(f"{path}:{lineno}: degree {l} conflicts with header L={L}")
        if l < 0 or abs(m) > l:
            raise DataError(f"{path}:{lineno}: invalid (l, m) = ({l}, {m})")
        values[l * l + l + m] = re + 1j * im
    return HarmonicCoeffs(L, values)


# -- field grid files ----------------------------------------------------------

def write_field(path, field):
    grid = field.grid
    with open(path, "w") as fh:
        fh.write(f"# L={grid.L} n_theta={grid.n_theta} n_phi={grid.n_phi}\n")
        vals = np.asarray(field.values, dtype=complex)
        for row in vals:
            fh.write(" ".join(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in row) + "\n")


def read_field(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataError(f"{path}:1: empty file")
    header = _parse_header(lines[0], path, ["L", "n_theta", "n_phi"])
    try:
        L = int(header["L"])
        n_theta = int(header["n_theta"])
        n_phi = int(header["n_phi"])
    except ValueError:
        raise DataError(f"{path}:1: malformed header") from None
    grid = make_grid(L)
    if (grid.n_theta, grid.n_phi) != (n_theta, n_phi):
        raise DataError(f"{path}:1: grid dimensions do not match bandlimit {L}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 2 * n_phi:
            raise DataError(f"{path}:{lineno}: expected {2 * n_phi} numbers")
        try:
            flat = np.asarray([float(t) for t in tokens])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed number") from None
        rows.append(flat[0::2] + 1j * flat[1::2])
    if len(rows) != n_theta:
        raise DataError(f"{path}: expected {n_theta} rows, found {len(rows)}")
    return SampledField(grid, np.asarray(rows))


# -- filter dumps and indexed complex vectors ----------------------------------

def _filter_header(params):
    return (
        f"# lambda={_fmt(params.lam)} J0={params.j0} "
        f"J={params.j_max} Pmax={params.p_max}\n"
    )


def _read_filter_header(lines, path):
    if not lines:
        raise DataError(f"{path}:1: empty file")
    header = _parse_header(lines[0], path, ["lambda", "J0", "J", "Pmax"])
    try:
        params = TilingParams(
            lam=float(header["lambda"]), j0=int(header["J0"]), p_max=int(header["Pmax"])
        )
    except ValueError as exc:
        raise DataError(f"{path}:1: bad tiling header ({exc})") from None
    if params.j_max != int(header["J"]):
        raise DataError(f"{path}:1: header J={header['J']} inconsistent with lambda/Pmax")
    return params


def write_filter(path, params, values):
    with open(path, "w") as fh:
        fh.write(_filter_header(params))
        for p, v in enumerate(np.asarray(values, dtype=float), start=1):
            fh.write(f"{p} {_fmt(v)}\n")


def read_filter(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    params = _read_filter_header(lines, path)
    values = np.zeros(params.p_max)
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise DataError(f"{path}:{lineno}: expected 'p value'")
        try:
            p, v = int(tokens[0]), float(tokens[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed number") from None
        if not 1 <= p <= params.p_max:
            raise DataError(f"{path}:{lineno}: index {p} outside 1..Pmax")
        values[p - 1] = v
        seen += 1
    if seen != params.p_max:
        raise DataError(f"{path}: expected {params.p_max} filter lines, found {seen}")
    return params, values


def write_indexed_complex(path, params, values):
    """Same layout as a filter dump with complex entries: ``p re im`` lines."""
    with open(path, "w") as fh:
        fh.write(_filter_header(params))
        for p, v in enumerate(np.asarray(values, dtype=complex), start=1):
            fh.write(f"{p} {_fmt(v.real)} {_fmt(v.imag)}\n")


def read_indexed_complex(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    params = _read_filter_header(lines, path)
    values = np.zeros(params.p_max, dtype=complex)
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise DataError(f"{path}:{lineno}: expected 'p re im'")
        try:
            p = int(tokens[0])
            values[p - 1] = float(tokens[1]) + 1j * float(tokens[2])
        except (ValueError, IndexError):
            raise DataError(f"{path}:{lineno}: malformed line") from None
        seen += 1
    if seen != params.p_max:
        raise DataError(f"{path}: expected {params.p_max} coefficient lines, found {seen}")
    return params, values


# -- basis cache ---------------------------------------------------------------

def region_hash(region):
    """Stable hash over the region's defining data (kind, geometry, mask bits)."""
    h = hashlib.sha256()
    h.update(region.kind.encode())
    if region.kind == "polar_cap":
        h.update(repr(float(region.opening)).encode())
        h.update(repr((float(region.center[0]), float(region.center[1]))).encode())
    else:
        h.update(repr(region.mask.shape).encode())
        h.update(np.packbits(region.mask).tobytes())
    return h.hexdigest()[:16]


def write_basis_cache(path, basis, reg_hash):
    n = basis.n_harmonic
    with open(path, "w") as fh:
        fh.write(f"# L={basis.L} region={reg_hash} N={_fmt(basis.shannon)}\n")
        for p in range(n):
            fh.write(f"{p + 1} {_fmt(basis.eigenvalues[p])}\n")
            row = basis.vectors[p]
            for idx in range(n):
                l, m = lm_from_flat(idx)
                fh.write(f"{l} {m} {_fmt(row[idx].real)} {_fmt(row[idx].imag)}\n")


def read_basis_cache(path):
    """Parse a basis cache; returns (SlepianBasis with region=None, region hash)."""
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise DataError(f"{path}:1: empty file")
    header = _parse_header(lines[0], path, ["L", "region", "N"])
    try:
        L = int(header["L"])
        shannon = float(header["N"])
    except ValueError:
        raise DataError(f"{path}:1: malformed header") from None
    n = L * L
    tokens = text.split("\n", 1)[1].split()
    expected = n * (2 + 4 * n)
    if len(tokens) != expected:
        raise DataError(f"{path}: expected {expected} tokens after header, found {len(tokens)}")
    try:
        data = np.asarray(tokens, dtype=float)
    except ValueError:
        raise DataError(f"{path}: malformed number in basis cache") from None
    blocks = data.reshape(n, 2 + 4 * n)
    if not np.array_equal(blocks[:, 0], np.arange(1, n + 1)):
        raise DataError(f"{path}: eigenvector blocks out of order")
    eigenvalues = blocks[:, 1].copy()
    body = blocks[:, 2:].reshape(n, n, 4)
    ls = np.asarray([lm_from_flat(i)[0] for i in range(n)], dtype=float)
    ms = np.asarray([lm_from_flat(i)[1] for i in range(n)], dtype=float)
    if not (np.array_equal(body[0, :, 0], ls) and np.array_equal(body[0, :, 1], ms)):
        raise DataError(f"{path}: eigenvector lines out of flat (l, m) order")
    vectors = body[:, :, 2] + 1j * body[:, :, 3]
    basis = SlepianBasis(L, None, eigenvalues, vectors, shannon)
    return basis, header["region"]


# -- key=value files (configs and reports) -------------------------------------

def write_keyvalues(path, pairs):
    with open(path, "w") as fh:
        for key, value in pairs.items():
            fh.write(f"{key}={value}\n")


def read_keyvalues(path):
    pairs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs


# -- plot data -----------------------------------------------------------------

def write_grid_csv(path, field):
    """Equirectangular dump: one ``theta,phi,value`` row per grid sample."""
    grid = field.grid
    with open(path, "w") as fh:
        fh.write("theta,phi,value\n")
        for ti, theta in enumerate(grid.theta_nodes):
            for pi, phi in enumerate(grid.phi_nodes):
                fh.write(f"{_fmt(theta)},{_fmt(phi)},{_fmt(field.values[ti, pi].real)}\n")


def write_curves_csv(path, bank):
    """Filter curves: index p followed by the scaling and wavelet filter values."""
    labels = [label for label, _ in bank.labelled_filters()]
    columns = [values for _, values in bank.labelled_filters()]
    with open(path, "w") as fh:
        fh.write("p," + ",".join(labels) + "\n")
        for i in range(bank.params.p_max):
            fh.write(f"{i + 1}," + ",".join(_fmt(col[i]) for col in columns) + "\n")
