"""Exact classical ceiling of a finite prepare-and-measure task by deterministic strategy enumeration.

For a linear score the classical optimum is attained at a deterministic
encoder-decoder pair, so scanning every pair gives the exact maximum.
Strategies are ordered lexicographically by (decoder index, encoder index),
where an encoder is a base-|M| counter over A and a decoder a base-|B|
counter over M x Y (first table entry most significant). Ties within
``tie_tolerance`` resolve to the first pair in that order.
"""
import itertools
from typing import Iterator, Optional, Tuple

import numpy as np

from src.core.base.errors import CapacityError, DomainError
from src.core.config.loader import get_config
from src.core.logging.setup import get_logger
from src.core.schemas.pam_task import DeterministicStrategy, PamTask

logger = get_logger(__name__)

DECODER_CHUNK = 1 << 15


def strategy_count(task: PamTask) -> int:
    """``|M|^|A| * |B|^(|M| |Y|)`` deterministic encoder-decoder pairs."""
    return task.n_m ** task.n_a * task.n_b ** (task.n_m * task.n_y)


def _digits(indices: np.ndarray, base: int, width: int) -> np.ndarray:
    """Base-``base`` digits of ``indices``, most significant first."""
    powers = base ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % base


def _weights(task: PamTask) -> np.ndarray:
    # w[a, y, b] = c[a, y, b] * pi(a, y)
    return task.coeff_array() * task.law_array()[:, :, None]


def _encoders(task: PamTask) -> Iterator[Tuple[int, ...]]:
    return itertools.product(range(task.n_m), repeat=task.n_a)


def strategy_score(task: PamTask, strategy: DeterministicStrategy) -> float:
    """Expected score ``sum c[a,y,b] pi(a,y) [b = g(f(a), y)]`` of one deterministic pair."""
    weights = _weights(task)
    total = 0.0
    for a in range(task.n_a):
        m = strategy.encoder[a]
        for y in range(task.n_y):
            total += weights[a, y, strategy.decode(m, y)]
    return float(total)


def mixture_score(task: PamTask, strategies, probabilities) -> float:
    """Score of a convex mixture of deterministic pairs (linear in the mixing weights)."""
    probabilities = np.asarray(probabilities, dtype=float)
    if np.any(probabilities < 0) or abs(probabilities.sum() - 1.0) > 1e-9:
        raise DomainError("mixture weights must be non-negative and sum to 1")
    return float(sum(p * strategy_score(task, s) for p, s in zip(probabilities, strategies)))


def pam_ceiling_enumerate(task: PamTask, max_strategies: Optional[int] = None,
                          tie_tolerance: Optional[float] = None) -> Tuple[float, DeterministicStrategy]:
    """Maximum classical score of ``task`` and the first maximising strategy.

    Raises:
        CapacityError: If the number of strategies exceeds the guard.
    """
    if max_strategies is None:
        max_strategies = get_config('ceilings.max_strategies', 10_000_000)
    limit = int(max_strategies)
    tol = float(tie_tolerance if tie_tolerance is not None else get_config('ceilings.tie_tolerance', 1e-12))
    count = strategy_count(task)
    if count > limit:
        raise CapacityError(count, limit)

    n_cells = task.n_m * task.n_y
    n_decoders = task.n_b ** n_cells
    weights = _weights(task)
    cell_index = np.arange(n_cells)

    # Per encoder: best value and the smallest decoder index reaching it
    per_encoder = []
    for encoder_index, encoder in enumerate(_encoders(task)):
        # v[m, y, b]: weight collected when message m is decoded to b under setting y
        v = np.zeros((task.n_m, task.n_y, task.n_b))
        for a, m in enumerate(encoder):
            v[m] += weights[a]
        v = v.reshape(n_cells, task.n_b)

        best_value = -np.inf
        best_decoder = -1
        for start in range(0, n_decoders, DECODER_CHUNK):
            indices = np.arange(start, min(start + DECODER_CHUNK, n_decoders), dtype=np.int64)
            outputs = _digits(indices, task.n_b, n_cells)
            scores = v[cell_index[None, :], outputs].sum(axis=1)
            chunk_best = scores.max()
            if chunk_best > best_value + tol:
                best_value = float(chunk_best)
                best_decoder = int(indices[np.flatnonzero(scores >= chunk_best - tol)[0]])
            elif chunk_best > best_value:
                best_value = float(chunk_best)
        per_encoder.append((best_value, best_decoder, encoder_index, encoder))

    value = max(entry[0] for entry in per_encoder)
    ties = [entry for entry in per_encoder if entry[0] >= value - tol]
    _, decoder_index, encoder_index, encoder = min(ties, key=lambda entry: (entry[1], entry[2]))
    decoder = _digits(np.array([decoder_index], dtype=np.int64), task.n_b, n_cells)[0]
    argmax = DeterministicStrategy(encoder=tuple(int(m) for m in encoder),
                                   decoder=tuple(int(b) for b in decoder), n_y=task.n_y)
    logger.info(f"Enumerated {count} strategies for task '{task.name}': ceiling {value:.12g}")
    return value, argmax


def rac_task(eps: float = 0.0, n_m: int = 2) -> PamTask:
    """The 2->1 RAC as a PAM task: ``a = 2*a0 + a1``, success coefficients, ``pi(a, y) = Pr(y) / 4``."""
    if abs(eps) > 0.5:
        raise DomainError(f"bias must satisfy |eps| <= 1/2, got {eps}")
    p_y = (0.5 + eps, 0.5 - eps)
    coeffs = []
    law = []
    for a in range(4):
        bits = (a >> 1, a & 1)
        for y in range(2):
            law.append(p_y[y] / 4.0)
            for b in range(2):
                coeffs.append(1.0 if b == bits[y] else 0.0)
    return PamTask(n_a=4, n_y=2, n_b=2, n_m=n_m, coeffs=tuple(coeffs), input_law=tuple(law),
                   name=f"rac(eps={eps:g},d={n_m})")
