"""Runtime settings with key=value config-file support.

Every key here is mirrored by a CLI flag; flags win over the config file,
which wins over the defaults below.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class Settings:
    dense_budget: int = 4000        # max n for dense pseudo-inverse fields
    threshold: float | None = None  # sparsification threshold; None = 1/sqrt(n)
    step_cap_factor: int = 50       # path tracing step cap = factor * n
    contour_levels: int = 10
    residual_warn: float = 1e-6     # solve residual above this flags the field
    trials: int = 11                # benchmark online-timing repetitions

    def replace(self, **kwargs) -> "Settings":
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return dataclasses.replace(self, **updates)


DEFAULTS = Settings()

_PARSERS = {
    "dense_budget": int,
    "threshold": float,
    "step_cap_factor": int,
    "contour_levels": int,
    "residual_warn": float,
    "trials": int,
}


def load_config(path: str | Path) -> Settings:
    """Parse a key=value config file ('#' starts a comment)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return DEFAULTS.replace(**values)
