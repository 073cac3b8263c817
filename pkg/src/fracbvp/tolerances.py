"""Default tolerances, overridable through ``FRACBVP_TOL``."""

from __future__ import annotations

import os

DEFAULT_TOL = 1e-8


def base_tolerance() -> float:
    raw = os.environ.get("FRACBVP_TOL")
    if raw is None or not raw.strip():
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"FRACBVP_TOL must be positive, got {raw!r}")
    return value


def scaled_tolerance(*scales: float) -> float:
    """``base_tolerance() * max(1, |s| for s in scales)``."""
    return base_tolerance() * max([1.0] + [abs(float(s)) for s in scales])
