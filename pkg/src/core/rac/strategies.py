"""Classical encoder policies for the 2->1 RAC and the parametric reference device.

Action 0 sends ``a0``, action 1 sends ``a1``; the decoder always outputs
``b = m``. Bandit policies keep a 2x2 action-value table ``q[s, a]``: the
plain bandit only uses row 0, the windowed bandit selects the row from the
sign of the query bias seen in its window of past queries.

Per-round callbacks run in the order ``choose_message`` (before the query is
revealed), then ``update`` and ``observe_query``. They update the state in
place and return it.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, NamedTuple, Optional, Tuple

import numpy as np

from src.core.base.errors import DomainError
from src.core.rac.trial import Bit
from src.core.schemas.run_config import StrategySpec, StrategyVariant


@dataclass
class BanditState:
    q: np.ndarray
    y_window: Deque[int] = field(default_factory=deque)
    zeros_in_window: int = 0
    regime: int = 0
    last_action: Optional[int] = None
    last_regime: int = 0

    @property
    def window_bias(self) -> float:
        """Empirical ``Pr(y=0) - 1/2`` over the (possibly partial) window; 0 when empty."""
        if not self.y_window:
            return 0.0
        return self.zeros_in_window / len(self.y_window) - 0.5

    def q_table(self) -> list:
        return self.q.tolist()


def initial_state(spec: StrategySpec) -> BanditState:
    q0, q1 = spec.initial_q()
    q = np.array([[q0, q1], [q0, q1]], dtype=float)
    return BanditState(q=q, y_window=deque(maxlen=spec.window))


def static_action(spec: StrategySpec) -> int:
    """Fixed action of the non-adaptive encoders."""
    if spec.variant is StrategyVariant.STATIC_A0:
        return 0
    if spec.variant is StrategyVariant.STATIC_A1:
        return 1
    if spec.variant is StrategyVariant.BIAS_AWARE:
        # Send the bit of the more frequently queried input
        return 0 if spec.known_eps >= 0 else 1
    raise DomainError(f"{spec.variant.value} has no static action")


def choose_message(spec: StrategySpec, state: BanditState, a0: Bit, a1: Bit,
                   rng) -> Tuple[Bit, int, BanditState]:
    """Selects the encoding action for this round and returns ``(m, action, state)``.

    Bandits draw two uniforms per round: the first decides exploration, the
    second picks the random action when exploring. Greedy ties go to action 0.
    """
    variant = spec.variant
    if variant is StrategyVariant.PARAM_DEVICE:
        raise DomainError("PARAM_DEVICE rounds are produced by device_outcome")
    if variant in (StrategyVariant.BANDIT, StrategyVariant.WINDOWED_BANDIT):
        u_explore = rng.random()
        u_action = rng.random()
        row = state.regime if variant is StrategyVariant.WINDOWED_BANDIT else 0
        if u_explore < spec.explore:
            action = 0 if u_action < 0.5 else 1
        else:
            q_row = state.q[row]
            action = 1 if q_row[1] > q_row[0] else 0
        state.last_action = action
        state.last_regime = row
    else:
        action = static_action(spec)
        state.last_action = action
    message = a1 if action else a0
    return message, action, state


def update(spec: StrategySpec, state: BanditState, action: int, reward: int) -> BanditState:
    """Moves ``q[s, action]`` toward ``reward`` with step ``eta`` in the row active when the action was chosen."""
    if not spec.is_adaptive:
        return state
    row = state.last_regime
    current = state.q[row, action]
    state.q[row, action] = current + spec.eta * (reward - current)
    return state


def observe_query(spec: StrategySpec, state: BanditState, y: Bit) -> BanditState:
    """Pushes the revealed query into the window and recomputes the regime (windowed bandit only)."""
    if spec.variant is not StrategyVariant.WINDOWED_BANDIT:
        return state
    window = state.y_window
    if len(window) == window.maxlen and window[0] == 0:
        state.zeros_in_window -= 1
    window.append(y)
    if y == 0:
        state.zeros_in_window += 1
    state.regime = 0 if state.window_bias >= 0 else 1
    return state


def device_outcome(spec: StrategySpec, rng) -> int:
    """Bernoulli(p_success) success indicator of the parametric device."""
    if spec.variant is not StrategyVariant.PARAM_DEVICE:
        raise DomainError(f"device_outcome needs a PARAM_DEVICE spec, got {spec.variant.value}")
    return int(rng.random() < spec.p_success)


class EncodedBlock(NamedTuple):
    m: np.ndarray
    b: np.ndarray
    actions: np.ndarray


def play_block(spec: StrategySpec, state: BanditState, a0: np.ndarray, a1: np.ndarray,
               y: np.ndarray, strategy_rng: np.random.Generator,
               device_rng: np.random.Generator) -> EncodedBlock:
    """Plays a whole block of rounds and returns message, output and action columns.

    Static encoders and the device are vectorised; bandits step through the
    per-round callbacks in order.
    """
    n = a0.shape[0]
    if spec.variant is StrategyVariant.PARAM_DEVICE:
        x = (device_rng.random(n) < spec.p_success).astype(np.int8)
        queried = np.where(y == 0, a0, a1).astype(np.int8)
        b = np.where(x == 1, queried, 1 - queried).astype(np.int8)
        return EncodedBlock(m=b.copy(), b=b, actions=np.full(n, -1, dtype=np.int8))

    if not spec.is_adaptive:
        action = static_action(spec)
        m = (a1 if action else a0).astype(np.int8)
        state.last_action = action
        return EncodedBlock(m=m, b=m.copy(), actions=np.full(n, action, dtype=np.int8))

    m = np.empty(n, dtype=np.int8)
    actions = np.empty(n, dtype=np.int8)
    for i, (a0_t, a1_t, y_t) in enumerate(zip(a0.tolist(), a1.tolist(), y.tolist())):
        m_t, action, state = choose_message(spec, state, a0_t, a1_t, strategy_rng)
        # Fixed decoder b = m
        reward = int(m_t == (a1_t if y_t else a0_t))
        update(spec, state, action, reward)
        observe_query(spec, state, y_t)
        m[i] = m_t
        actions[i] = action
    return EncodedBlock(m=m, b=m.copy(), actions=actions)
