"""Selection rules deciding which rounds of a completed trace are kept for evaluation."""
import math

import numpy as np

from src.core.base.errors import DomainError
from src.core.logging.setup import get_logger
from src.core.rac.trial import Trace
from src.core.schemas.run_config import SelectionSpec, SelectionVariant

logger = get_logger(__name__)


def discard_count(f: float, n: int) -> int:
    """Number of rounds removed for discard fraction ``f``: ``f * n`` rounded half-up."""
    return int(math.floor(f * n + 0.5))


def apply_selection(trace: Trace, spec: SelectionSpec, rng: np.random.Generator) -> Trace:
    """Returns a copy of ``trace`` with kept flags set by the selection rule.

    RANDOM discards ``discard_count`` rounds uniformly; ADVERSARIAL discards
    failures first (uniformly among them) and only then successes.

    Raises:
        DomainError: If the trace already went through selection.
    """
    if trace.selected or (len(trace) and trace.kept.min() == 0):
        raise DomainError("double selection: trace already carries selection flags")

    n = len(trace)
    kept = np.ones(n, dtype=np.int8)
    if spec.variant is SelectionVariant.NONE:
        return trace.with_kept(kept)

    k = discard_count(spec.discard_fraction, n)
    if spec.variant is SelectionVariant.RANDOM:
        discarded = rng.choice(n, size=k, replace=False)
    else:
        failures = np.flatnonzero(trace.x == 0)
        if k <= failures.size:
            discarded = rng.choice(failures, size=k, replace=False)
        else:
            successes = np.flatnonzero(trace.x == 1)
            extra = rng.choice(successes, size=k - failures.size, replace=False)
            discarded = np.concatenate([failures, extra])
    kept[discarded] = 0
    logger.debug(f"{spec.tag()} discarded {k} of {n} rounds")
    return trace.with_kept(kept)
