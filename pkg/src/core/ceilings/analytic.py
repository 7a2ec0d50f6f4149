"""Closed-form classical ceilings of the 2->1 RAC under biased queries."""
from typing import Sequence

import numpy as np

from src.core.base.errors import DomainError

NOMINAL_CEILING = 0.75


def rac_effective_ceiling(eps: float) -> float:
    """Best classical score when ``Pr(y=0) = 1/2 + eps``: ``3/4 + |eps|/2``."""
    if abs(eps) > 0.5:
        raise DomainError(f"bias must satisfy |eps| <= 1/2, got {eps}")
    return NOMINAL_CEILING + abs(eps) / 2.0


def robust_ceiling(eps_max: float) -> float:
    """Worst case of the effective ceiling over ``|eps| <= eps_max``, attained at the boundary."""
    if not 0.0 <= eps_max <= 0.5:
        raise DomainError(f"eps_max must lie in [0, 1/2], got {eps_max}")
    return NOMINAL_CEILING + eps_max / 2.0


def nonstationary_ceiling(bias_schedule: Sequence[float]) -> float:
    """Average per-round optimum of a classical encoder that knows the bias schedule."""
    schedule = np.asarray(bias_schedule, dtype=float).reshape(-1)
    if schedule.size == 0:
        raise DomainError("empty bias schedule")
    if np.any(np.abs(schedule) > 0.5):
        raise DomainError("schedule entries must satisfy |eps_t| <= 1/2")
    return float(NOMINAL_CEILING + np.mean(np.abs(schedule)) / 2.0)
