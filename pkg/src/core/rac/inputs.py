"""Per-round input laws for ``(a0, a1, y)``.

Every round consumes exactly four uniforms from the input stream, in the order
(a0, a1, y, walk step). ``generate_inputs`` draws them as one ``(n, 4)`` block,
which numpy fills in the same order as ``n`` successive ``rng.random(4)``
calls, so the block path and ``next_inputs`` agree bit for bit.
"""
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Tuple

import numpy as np

from src.core.base.errors import DomainError
from src.core.logging.setup import get_logger
from src.core.schemas.run_config import InputModelSpec, InputVariant

logger = get_logger(__name__)

UNIFORMS_PER_ROUND = 4


@dataclass(frozen=True)
class InputState:
    t: int = 1
    prev_y: Optional[int] = None
    walk_eps: float = 0.0


class InputBlock(NamedTuple):
    """Input columns of a block of rounds; ``eps[i]`` is the bias round i was drawn with given the past."""
    a0: np.ndarray
    a1: np.ndarray
    y: np.ndarray
    eps: np.ndarray


def stationary_bias(p00: float, p10: float) -> float:
    """Stationary ``Pr(y=0) - 1/2`` of the two-state query chain."""
    if p00 == 1.0 and p10 == 0.0:
        raise DomainError("reducible chain: p00=1 and p10=0")
    q = p10 / (1.0 - p00 + p10)
    return q - 0.5


def markov_from_stay(p_stay: float, eps_target: float) -> Tuple[float, float]:
    """Transition pair ``(p00, p10)`` with ``p00 = p_stay`` and stationary bias ``eps_target``.

    Raises:
        DomainError: If no valid ``p10`` exists for the requested pair.
    """
    if not 0.0 <= p_stay <= 1.0:
        raise DomainError(f"p_stay must lie in [0, 1], got {p_stay}")
    if abs(eps_target) > 0.5:
        raise DomainError(f"eps_target must satisfy |eps| <= 1/2, got {eps_target}")
    q = 0.5 + eps_target
    if q == 1.0:
        if p_stay != 1.0:
            raise DomainError("eps_target=1/2 needs p_stay=1 (y=0 absorbing)")
        # y=0 absorbing; p10=1 enters it at the first opportunity
        return 1.0, 1.0
    # q = q*p00 + (1-q)*p10  =>  p10 = q*(1-p00)/(1-q)
    p10 = q * (1.0 - p_stay) / (1.0 - q)
    if not 0.0 <= p10 <= 1.0:
        raise DomainError(f"infeasible chain: p_stay={p_stay} cannot reach eps={eps_target} (p10={p10:.4f})")
    if p_stay == 1.0 and p10 == 0.0:
        raise DomainError("reducible chain: p00=1 and p10=0")
    return p_stay, p10


def bias_at(spec: InputModelSpec, t: int) -> float:
    """Deterministic sine-drift bias ``eps0 + A sin(2 pi t / T)`` clipped to [-1/2, 1/2]."""
    if spec.variant is not InputVariant.DRIFT_SINE:
        raise DomainError(f"bias_at needs a DRIFT_SINE spec, got {spec.variant.value}")
    value = spec.epsilon0 + spec.amp * math.sin(2.0 * math.pi * t / spec.period)
    return min(0.5, max(-0.5, value))


def initial_state(spec: InputModelSpec) -> InputState:
    if spec.variant is InputVariant.DRIFT_WALK:
        return InputState(t=1, walk_eps=spec.epsilon0)
    return InputState(t=1)


def round_bias(spec: InputModelSpec, state: InputState) -> float:
    """Bias the next query is drawn with, conditioned on everything before it."""
    variant = spec.variant
    if variant is InputVariant.IID_BIAS:
        return spec.epsilon
    if variant is InputVariant.MARKOV:
        if state.prev_y is None:
            # Chains start from their stationary law
            return stationary_bias(spec.p00, spec.p10)
        return (spec.p00 if state.prev_y == 0 else spec.p10) - 0.5
    if variant is InputVariant.DRIFT_SINE:
        return bias_at(spec, state.t)
    return state.walk_eps


def _advance(spec: InputModelSpec, state: InputState, y: int, u_walk: float) -> InputState:
    if spec.variant is InputVariant.DRIFT_WALK:
        direction = 1.0 if u_walk < 0.5 else -1.0
        walk = min(spec.bound, max(-spec.bound, state.walk_eps + spec.step * direction))
        return replace(state, t=state.t + 1, prev_y=y, walk_eps=walk)
    return replace(state, t=state.t + 1, prev_y=y)


def next_inputs(spec: InputModelSpec, state: InputState, rng: np.random.Generator) -> Tuple[int, int, int, InputState]:
    """Draws one round's ``(a0, a1, y)`` and returns the advanced state.

    Preparation bits are fair and independent of the query; ``y = 0`` with
    probability ``1/2 + round_bias(spec, state)``.
    """
    u = rng.random(UNIFORMS_PER_ROUND)
    eps_t = round_bias(spec, state)
    a0 = int(u[0] < 0.5)
    a1 = int(u[1] < 0.5)
    y = 0 if u[2] < 0.5 + eps_t else 1
    return a0, a1, y, _advance(spec, state, y, float(u[3]))


def generate_inputs(spec: InputModelSpec, n: int, rng: np.random.Generator,
                    state: Optional[InputState] = None) -> InputBlock:
    """Draws ``n`` rounds of inputs in one block, matching ``n`` calls of ``next_inputs``."""
    if n < 1:
        raise DomainError(f"need at least one round, got {n}")
    state = state or initial_state(spec)
    u = rng.random((n, UNIFORMS_PER_ROUND))
    a0 = (u[:, 0] < 0.5).astype(np.int8)
    a1 = (u[:, 1] < 0.5).astype(np.int8)

    if spec.variant is InputVariant.IID_BIAS:
        eps = np.full(n, spec.epsilon)
        y = (u[:, 2] >= 0.5 + eps).astype(np.int8)
    elif spec.variant is InputVariant.DRIFT_SINE:
        t = np.arange(state.t, state.t + n, dtype=float)
        eps = np.clip(spec.epsilon0 + spec.amp * np.sin(2.0 * np.pi * t / spec.period), -0.5, 0.5)
        y = (u[:, 2] >= 0.5 + eps).astype(np.int8)
    elif spec.variant is InputVariant.MARKOV:
        eps = np.empty(n)
        y = np.empty(n, dtype=np.int8)
        eps_t = round_bias(spec, state)
        after = (spec.p00 - 0.5, spec.p10 - 0.5)
        for i, u_y in enumerate(u[:, 2].tolist()):
            y_t = 0 if u_y < 0.5 + eps_t else 1
            eps[i] = eps_t
            y[i] = y_t
            eps_t = after[y_t]
    else:
        eps = np.empty(n)
        y = np.empty(n, dtype=np.int8)
        walk = state.walk_eps
        for i, (u_y, u_walk) in enumerate(u[:, 2:4].tolist()):
            y[i] = 0 if u_y < 0.5 + walk else 1
            eps[i] = walk
            walk = min(spec.bound, max(-spec.bound, walk + (spec.step if u_walk < 0.5 else -spec.step)))

    logger.debug(f"Generated {n} rounds of {spec.tag()} inputs")
    return InputBlock(a0=a0, a1=a1, y=y, eps=eps)
