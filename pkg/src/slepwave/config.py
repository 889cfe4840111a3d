"""Flat key=value pipeline configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import DataError


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a pipeline run needs, round-trippable through key=value text.

    ``pmax`` selects the tiling domain: "shannon" (ceiling of the Shannon
    number, the region-limited default), "full" (L^2), or an explicit integer.
    """

    L: int = 16
    kind: str = "polar_cap"
    opening_deg: float = 40.0
    center_theta_deg: float = 0.0
    center_phi_deg: float = 0.0
    threshold_field: str | None = None
    fwhm_deg: float | None = None
    lam: float = 3.0
    j0: int = 2
    n_sigma: tuple = (2.0, 3.0, 5.0)
    snr_db: float = 4.0
    seed: int | None = None
    pmax: str = "shannon"
    cache_dir: str = "cache"
    out_dir: str = "out"

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("bandlimit must be >= 1")
        if self.kind not in ("polar_cap", "full_sphere"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "polar_cap" and not 0.0 < self.opening_deg < 180.0:
            raise ValueError("cap opening outside (0, 180) degrees")
        if not self.lam > 1.0:
            raise ValueError("lambda must exceed 1")
        if self.j0 < 0:
            raise ValueError("J0 must be non-negative")
        if any(ns < 0.0 for ns in self.n_sigma):
            raise ValueError("n_sigma values must be non-negative")
        if self.fwhm_deg is not None and not self.fwhm_deg > 0.0:
            raise ValueError("FWHM must be positive")
        if isinstance(self.pmax, str):
            if self.pmax not in ("shannon", "full"):
                raise ValueError("pmax must be 'shannon', 'full', or an integer")
        elif int(self.pmax) < 1:
            raise ValueError("pmax must be >= 1")

    def region_spec(self):
        """Region mapping with angles converted to radians."""
        if self.kind == "full_sphere":
            return {"kind": "full_sphere"}
        return {
            "kind": "polar_cap",
            "opening": math.radians(self.opening_deg),
            "center_theta": math.radians(self.center_theta_deg),
            "center_phi": math.radians(self.center_phi_deg),
        }

    def resolve_pmax(self, shannon):
        if self.pmax == "shannon":
            return min(self.L * self.L, max(1, math.ceil(shannon - 1e-9)))
        if self.pmax == "full":
            return self.L * self.L
        return int(self.pmax)

    def to_text(self):
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "n_sigma":
                value = ",".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            key = "lambda" if f.name == "lam" else f.name
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, source="<config>"):
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{source}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "lambda":
                key = "lam"
            if key not in known:
                raise DataError(f"{source}:{lineno}: unknown key {key!r}")
            kwargs[key] = value
        return cls(**_coerce(kwargs))

    def updated(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _coerce(kwargs):
    out = {}
    for key, value in kwargs.items():
        if key in ("L", "j0"):
            out[key] = int(value)
        elif key == "seed":
            out[key] = int(value)
        elif key in ("opening_deg", "center_theta_deg", "center_phi_deg", "lam",
                     "snr_db", "fwhm_deg"):
            out[key] = float(value)
        elif key == "n_sigma":
            out[key] = tuple(float(v) for v in value.split(",") if v)
        elif key == "pmax":
            out[key] = value if value in ("shannon", "full") else int(value)
        else:
            out[key] = value
    return out


def load_config(path):
    with open(path) as fh:
        text = fh.read()
    try:
        return PipelineConfig.from_text(text, source=str(path))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"{path}: bad config value ({exc})") from None
