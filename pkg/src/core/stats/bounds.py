"""Finite-sample bounds: the martingale-safe score bound and the query-bias interval.

Bias follows ``eps = Pr(y=0) - 1/2``. Under this convention a Hoeffding
half-width ``delta`` on ``q = Pr(y=0)`` is also the half-width on ``eps``, so
``eps_max = min(|eps_hat| + delta, 1/2)``. (With ``eps = 2q - 1`` one would
instead propagate ``2 * delta``.)
"""
import math
from typing import Dict, Protocol

from src.core.base.errors import DomainError
from src.core.schemas.report import BiasEstimate


class ConcentrationBound(Protocol):
    name: str

    def lower(self, s_hat: float, n: int, alpha: float) -> float:
        """Lower confidence bound on the mean of ``n`` bounded increments with empirical mean ``s_hat``."""
        ...


def _check_level(value: float, name: str) -> None:
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")


class AzumaHoeffdingBound:
    """``s_hat - sqrt(ln(1/alpha) / (2n))``, valid for {0,1} increments with history-dependent means."""

    name = "azuma"

    def penalty(self, n: int, alpha: float) -> float:
        _check_level(alpha, "alpha")
        if n < 1:
            raise DomainError(f"need at least one round, got n={n}")
        return math.sqrt(math.log(1.0 / alpha) / (2.0 * n))

    def lower(self, s_hat: float, n: int, alpha: float) -> float:
        if not 0.0 <= s_hat <= 1.0:
            raise DomainError(f"score must lie in [0, 1], got {s_hat}")
        return min(1.0, max(0.0, s_hat - self.penalty(n, alpha)))


BOUNDS: Dict[str, ConcentrationBound] = {AzumaHoeffdingBound.name: AzumaHoeffdingBound()}


def get_bound(name: str) -> ConcentrationBound:
    try:
        return BOUNDS[name]
    except KeyError:
        raise DomainError(f"unknown concentration bound '{name}' (known: {sorted(BOUNDS)})") from None


def azuma_lower(s_hat: float, n: int, alpha: float) -> float:
    """Azuma-Hoeffding lower confidence bound, clamped to [0, 1]."""
    return BOUNDS["azuma"].lower(s_hat, n, alpha)


def bias_interval(n0: int, n: int, beta: float) -> BiasEstimate:
    """Hoeffding ``(1 - beta)`` interval for the query bias from ``n0`` zeros in ``n`` queries."""
    _check_level(beta, "beta")
    if n < 1:
        raise DomainError("bias interval needs n >= 1")
    if not 0 <= n0 <= n:
        raise DomainError(f"n0 must lie in [0, n], got n0={n0}, n={n}")
    eps_hat = n0 / n - 0.5
    delta = math.sqrt(math.log(2.0 / beta) / (2.0 * n))
    eps_max = min(abs(eps_hat) + delta, 0.5)
    return BiasEstimate(eps_hat=eps_hat, delta=delta, eps_max=eps_max, n=n)
