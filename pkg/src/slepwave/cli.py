"""Command-line driver: basis, shannon, tiling, analyze, synth, denoise, sht.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .config import PipelineConfig, load_config
from .datasets import ingest_coeffs, synthetic_topography
from .denoise import NoiseModel, add_white_noise, denoise_pipeline, snr, target_snr_sigma
from .errors import DataError, NumericalError
from .fileio import (
    read_basis_cache,
    read_coeffs,
    read_field,
    read_indexed_complex,
    region_hash,
    write_basis_cache,
    write_coeffs,
    write_curves_csv,
    write_field,
    write_filter,
    write_grid_csv,
    write_indexed_complex,
    write_keyvalues,
)
from .slepian import (
    SlepianCoeffs,
    assemble_k_matrix,
    build_region,
    harmonic_to_slepian,
    shannon_number,
    slepian_synthesis,
    slepian_to_harmonic,
    solve_eigenproblem,
)
from .sphere import forward_sht, inverse_sht, make_grid
from .wavelets import (
    TilingParams,
    WaveletCoefficients,
    build_filter_bank,
    wavelet_analysis,
    wavelet_synthesis,
)

log = logging.getLogger(__name__)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_config_flags(parser):
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--L", type=int, dest="L")
    parser.add_argument("--kind", choices=["polar_cap", "full_sphere"])
    parser.add_argument("--opening-deg", type=float, dest="opening_deg")
    parser.add_argument("--center-theta-deg", type=float, dest="center_theta_deg")
    parser.add_argument("--center-phi-deg", type=float, dest="center_phi_deg")
    parser.add_argument("--threshold-field", dest="threshold_field",
                        help="coefficient file; cap membership also requires field > 0")
    parser.add_argument("--fwhm-deg", type=float, dest="fwhm_deg",
                        help="Gaussian smoothing FWHM applied on ingestion, degrees")
    parser.add_argument("--lambda", type=float, dest="lam")
    parser.add_argument("--j0", type=int, dest="j0")
    parser.add_argument("--n-sigma", dest="n_sigma",
                        help="comma-separated threshold multiples, e.g. 2,3,5")
    parser.add_argument("--snr-db", type=float, dest="snr_db")
    parser.add_argument("--seed", type=int, dest="seed")
    parser.add_argument("--pmax", dest="pmax", help="shannon | full | integer")
    parser.add_argument("--cache-dir", dest="cache_dir")
    parser.add_argument("--out-dir", dest="out_dir")


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides = {}
    for name in ("L", "kind", "opening_deg", "center_theta_deg", "center_phi_deg",
                 "threshold_field", "fwhm_deg", "lam", "j0", "snr_db", "seed",
                 "cache_dir", "out_dir"):
        overrides[name] = getattr(args, name, None)
    if getattr(args, "n_sigma", None) is not None:
        overrides["n_sigma"] = tuple(float(v) for v in args.n_sigma.split(",") if v)
    if getattr(args, "pmax", None) is not None:
        overrides["pmax"] = args.pmax if args.pmax in ("shannon", "full") else int(args.pmax)
    try:
        return cfg.updated(**overrides)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _build_region(cfg, grid):
    spec = cfg.region_spec()
    threshold = None
    if cfg.threshold_field:
        fwhm = math.radians(cfg.fwhm_deg) if cfg.fwhm_deg else None
        dataset = ingest_coeffs(cfg.threshold_field, fwhm=fwhm)
        if dataset.coeffs.L != cfg.L:
            raise DataError(
                f"{cfg.threshold_field}: bandlimit {dataset.coeffs.L} does not match L={cfg.L}"
            )
        threshold = inverse_sht(dataset.coeffs, grid)
    return build_region(spec, grid=grid, threshold=threshold)


def _load_or_build_basis(cfg, grid, region):
    h = region_hash(region)
    cache_dir = Path(cfg.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"basis_L{cfg.L}_{h}.txt"
    if path.exists():
        basis, stored = read_basis_cache(path)
        if stored != h or basis.L != cfg.L:
            log.warning("basis cache %s carries a different region hash; rebuilding", path)
        else:
            log.info("basis cache hit: %s", path)
            basis.region = region
            return basis, path
    K = assemble_k_matrix(region, grid)
    basis = solve_eigenproblem(K, region)
    write_basis_cache(path, basis, h)
    return basis, path


def _signal_coeffs(cfg, args):
    source = getattr(args, "signal", "synthetic") or "synthetic"
    if source == "synthetic":
        if cfg.seed is None:
            raise _UsageError("--seed is required for a synthetic signal")
        return synthetic_topography(cfg.L, cfg.seed)
    fwhm = math.radians(cfg.fwhm_deg) if cfg.fwhm_deg else None
    dataset = ingest_coeffs(source, fwhm=fwhm)
    if dataset.coeffs.L != cfg.L:
        raise DataError(f"{source}: bandlimit {dataset.coeffs.L} does not match L={cfg.L}")
    return dataset.coeffs


def _bank_for(cfg, region):
    n_shannon = shannon_number(region, cfg.L)
    p_max = cfg.resolve_pmax(n_shannon)
    params = TilingParams(lam=cfg.lam, j0=cfg.j0, p_max=p_max)
    return build_filter_bank(params)


def _ns_key(ns):
    return f"{ns:g}".replace(".", "p").replace("-", "m")


def cmd_shannon(args):
    cfg = _config_from_args(args)
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    print(f"L={cfg.L}")
    print(f"area={region.area!r}")
    print(f"N={shannon_number(region, cfg.L)!r}")
    return 0


def cmd_basis(args):
    cfg = _config_from_args(args)
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    basis, path = _load_or_build_basis(cfg, grid, region)
    print(f"L={cfg.L}")
    print(f"area={region.area!r}")
    print(f"N={basis.shannon!r}")
    print(f"cache={path}")
    for p in range(min(10, basis.n_harmonic)):
        print(f"mu_{p + 1}={float(basis.eigenvalues[p])!r}")
    return 0


def cmd_tiling(args):
    cfg = _config_from_args(args)
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    bank = _bank_for(cfg, region)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for label, values in bank.labelled_filters():
        write_filter(out / f"tiling_{label}.txt", bank.params, values)
    write_curves_csv(out / "tiling_curves.csv", bank)
    print(f"pmax={bank.params.p_max}")
    print(f"J0={bank.params.j0}")
    print(f"J={bank.params.j_max}")
    print(f"scales={','.join(str(j) for j in bank.params.j_values)}")
    print(f"admissibility_residual={bank.admissibility_residual()!r}")
    print(f"out={out}")
    return 0


def cmd_analyze(args):
    cfg = _config_from_args(args)
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    basis, _ = _load_or_build_basis(cfg, grid, region)
    bank = _bank_for(cfg, region)
    coeffs = _signal_coeffs(cfg, args)
    signal = harmonic_to_slepian(coeffs, basis, truncation=bank.params.p_max)
    wav = wavelet_analysis(signal, bank)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    blocks = [("scaling", wav.scaling)] + [
        (f"j{j}", wav.wavelets[i]) for i, j in enumerate(bank.params.j_values)
    ]
    for label, values in blocks:
        write_indexed_complex(out / f"wavelet_coeffs_{label}.txt", bank.params, values)
        field = slepian_synthesis(SlepianCoeffs(cfg.L, values), basis, grid)
        write_grid_csv(out / f"wavelet_field_{label}.csv", field)
    write_grid_csv(out / "signal_field.csv", slepian_synthesis(signal, basis, grid))
    print(f"pmax={bank.params.p_max}")
    print(f"scales={','.join(str(j) for j in bank.params.j_values)}")
    print(f"out={out}")
    return 0


def cmd_synth(args):
    cfg = _config_from_args(args)
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    basis, _ = _load_or_build_basis(cfg, grid, region)
    in_dir = Path(args.in_dir)
    params, scaling = read_indexed_complex(in_dir / "wavelet_coeffs_scaling.txt")
    rows = []
    for j in params.j_values:
        params_j, values = read_indexed_complex(in_dir / f"wavelet_coeffs_j{j}.txt")
        if params_j != params:
            raise DataError(f"{in_dir}: wavelet files disagree on the tiling")
        rows.append(values)
    wav = WaveletCoefficients(L=cfg.L, params=params, scaling=scaling,
                              wavelets=np.stack(rows))
    bank = build_filter_bank(params)
    rec = wavelet_synthesis(wav, bank)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_indexed_complex(out / "synthesis_slepian.txt", params, rec.values)
    write_coeffs(out / "synthesis_coeffs.txt", slepian_to_harmonic(rec, basis))
    write_grid_csv(out / "synthesis_field.csv", slepian_synthesis(rec, basis, grid))
    print(f"pmax={params.p_max}")
    print(f"energy={float(np.sum(np.abs(rec.values) ** 2))!r}")
    print(f"out={out}")
    return 0


def cmd_denoise(args):
    cfg = _config_from_args(args)
    if cfg.seed is None:
        raise _UsageError("--seed is required: denoising draws a noise realisation")
    grid = make_grid(cfg.L)
    region = _build_region(cfg, grid)
    basis, _ = _load_or_build_basis(cfg, grid, region)
    bank = _bank_for(cfg, region)
    coeffs = _signal_coeffs(cfg, args)
    s = harmonic_to_slepian(coeffs, basis, truncation=bank.params.p_max)
    sigma = target_snr_sigma(s, cfg.snr_db)
    model = NoiseModel(sigma=sigma, seed=cfg.seed)
    x = add_white_noise(s, model)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "L": cfg.L,
        "seed": cfg.seed,
        "sigma": repr(sigma),
        "target_snr_db": repr(cfg.snr_db),
        "input_snr_db": repr(snr(x, s)),
    }
    write_grid_csv(out / "noisy_field.csv", slepian_synthesis(x, basis, grid))
    for ns in cfg.n_sigma:
        stats = {}
        d = denoise_pipeline(x, bank, basis, model, ns, grid, stats=stats)
        key = _ns_key(ns)
        report[f"snr_out_{key}"] = repr(snr(d, s))
        for label, frac in stats["kept_fraction"].items():
            report[f"kept_fraction_{key}_{label}"] = repr(frac)
        for label, rms in stats["threshold_rms"].items():
            report[f"threshold_rms_{key}_{label}"] = repr(rms)
        write_indexed_complex(out / f"denoised_slepian_{key}.txt", bank.params, d.values)
        write_grid_csv(out / f"denoised_field_{key}.csv", slepian_synthesis(d, basis, grid))
    write_keyvalues(out / "denoise_report.txt", report)
    print(f"input_snr_db={report['input_snr_db']}")
    for ns in cfg.n_sigma:
        key = _ns_key(ns)
        print(f"snr_out_{key}={report[f'snr_out_{key}']}")
    print(f"out={out}")
    return 0


def cmd_sht(args):
    if args.forward == args.inverse:
        raise _UsageError("pass exactly one of --forward / --inverse")
    if args.forward:
        field = read_field(args.infile)
        write_coeffs(args.outfile, forward_sht(field))
        print(f"L={field.grid.L}")
    else:
        coeffs = read_coeffs(args.infile)
        L = args.L or coeffs.L
        if L < coeffs.L:
            raise _UsageError("--L must not be below the file bandlimit")
        field = inverse_sht(coeffs, make_grid(L))
        write_field(args.outfile, field)
        print(f"L={L}")
    print(f"out={args.outfile}")
    return 0


def build_parser():
    parser = _Parser(prog="slepwave",
                     description="Slepian wavelets on the sphere: basis, tiling, denoising")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, blurb in [
        ("shannon", cmd_shannon, "print the Shannon number of a region"),
        ("basis", cmd_basis, "build (and cache) the concentration eigenbasis"),
        ("tiling", cmd_tiling, "build the filter bank and dump its curves"),
        ("analyze", cmd_analyze, "wavelet-analyse a signal on the region"),
        ("denoise", cmd_denoise, "add noise at a target SNR and hard-threshold it away"),
    ]:
        p = sub.add_parser(name, help=blurb)
        _add_config_flags(p)
        if name in ("analyze", "denoise"):
            p.add_argument("--signal", default="synthetic",
                           help="coefficient file, or 'synthetic' (default)")
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="reconstruct a signal from wavelet coefficient files")
    _add_config_flags(p)
    p.add_argument("--in-dir", required=True, dest="in_dir",
                   help="directory holding wavelet_coeffs_*.txt")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sht", help="forward/inverse spherical harmonic transform on files")
    p.add_argument("--forward", action="store_true")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--in", required=True, dest="infile")
    p.add_argument("--out", required=True, dest="outfile")
    p.add_argument("--L", type=int, dest="L")
    p.set_defaults(func=cmd_sht)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse -h
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
