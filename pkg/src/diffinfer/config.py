"""Run configuration: defaults, ``key=value`` files and seed derivation."""

from __future__ import annotations

from dataclasses import dataclass, asdict, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    graph: Optional[str] = None  # TSV path; when unset a random graph is generated
    n: int = 150
    avg_degree: float = 4.0
    beta: int = 300
    seed_ratio: float = 0.15
    alpha_mean: float = 0.3
    alpha_std: float = 0.05
    mu: float = 0.3
    r: int = 100
    tol: float = 0.01
    max_iter: int = 1000
    rng_seed: int = 0
    out_dir: str = "."
    obs: str = "observations.csv"
    truth: str = "truth.tsv"
    inferred: str = "inferred.tsv"
    trace: str = "trace.tsv"
    alpha_dump: str = "alpha.tsv"
    metrics: str = "metrics.txt"
    manifest: str = "manifest.txt"

    def __post_init__(self):
        checks = {
            "n": self.n >= 2,
            "avg_degree": self.avg_degree > 0,
            "beta": self.beta >= 1,
            "seed_ratio": 0 < self.seed_ratio < 1,
            "alpha_mean": 0 < self.alpha_mean < 1,
            "alpha_std": self.alpha_std >= 0,
            "mu": self.mu >= 0,
            "r": self.r >= 1,
            "tol": self.tol > 0,
            "max_iter": self.max_iter >= 1,
        }
        for name, ok in checks.items():
            if not ok:
                raise ConfigError(f"invalid value for {name}: {getattr(self, name)!r}")
        for f in ("out_dir", "obs", "truth", "inferred", "trace", "alpha_dump", "metrics", "manifest"):
            if not getattr(self, f):
                raise ConfigError(f"path field {f} must be non-empty")

    def path(self, name: str) -> Path:
        p = Path(getattr(self, name))
        return p if p.is_absolute() else Path(self.out_dir) / p

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self):
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def coerce(name: str, raw: str):
    if name not in _TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    kind = _TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}") from None
    return raw


def load_config(path) -> dict:
    """Parse a ``key=value`` file (``#`` comments allowed) into typed overrides."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value at line {lineno} of {path}")
        key = key.strip().replace("-", "_")
        out[key] = coerce(key, val.strip())
    return out


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from integer parts."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])
