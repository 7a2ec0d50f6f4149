import numpy as np
import pytest
from pydantic import ValidationError

from src.core.base.errors import DomainError
from src.core.rac.strategies import (
    choose_message,
    device_outcome,
    initial_state,
    observe_query,
    play_block,
    update,
)
from src.core.schemas.run_config import StrategySpec, StrategyVariant


def _bandit(**kwargs):
    return StrategySpec(variant=StrategyVariant.BANDIT, **kwargs)


def _windowed(window=4, **kwargs):
    return StrategySpec(variant=StrategyVariant.WINDOWED_BANDIT, window=window, **kwargs)


class TestChooseMessage:

    def test_bias_aware_sends_more_queried_bit(self):
        spec = StrategySpec(variant=StrategyVariant.BIAS_AWARE, known_eps=0.2)
        m, action, _ = choose_message(spec, initial_state(spec), 1, 0, np.random.default_rng(0))
        assert (m, action) == (1, 0)

    def test_bias_aware_negative_bias_sends_a1(self):
        spec = StrategySpec(variant=StrategyVariant.BIAS_AWARE, known_eps=-0.1)
        m, action, _ = choose_message(spec, initial_state(spec), 1, 0, np.random.default_rng(0))
        assert (m, action) == (0, 1)

    def test_static_encoders(self):
        rng = np.random.default_rng(0)
        for variant, expected in ((StrategyVariant.STATIC_A0, 1), (StrategyVariant.STATIC_A1, 0)):
            spec = StrategySpec(variant=variant)
            m, _, _ = choose_message(spec, initial_state(spec), 1, 0, rng)
            assert m == expected

    def test_greedy_argmax(self):
        spec = _bandit(explore=0.0, q_init=(0.9, 0.1))
        state = initial_state(spec)
        rng = np.random.default_rng(1)
        for _ in range(100):
            _, action, state = choose_message(spec, state, 0, 1, rng)
            assert action == 0

    def test_greedy_tie_goes_to_action_zero(self):
        spec = _bandit(explore=0.0, q_init=0.5)
        _, action, _ = choose_message(spec, initial_state(spec), 0, 1, np.random.default_rng(1))
        assert action == 0

    def test_full_exploration_picks_both_actions(self):
        spec = _bandit(explore=1.0, q_init=(0.9, 0.1))
        state = initial_state(spec)
        rng = np.random.default_rng(2)
        actions = {choose_message(spec, state, 0, 1, rng)[1] for _ in range(200)}
        assert actions == {0, 1}

    def test_device_has_no_message_rule(self):
        spec = StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=0.9)
        with pytest.raises(DomainError, match="device_outcome"):
            choose_message(spec, initial_state(spec), 0, 1, np.random.default_rng(0))


class TestUpdate:

    @pytest.mark.parametrize("q0,eta,reward,expected", [
        (0.0, 0.1, 1, 0.1),
        (0.5, 0.1, 0, 0.45),
        (1.0, 0.3, 1, 1.0),
    ])
    def test_incremental_step(self, q0, eta, reward, expected):
        spec = _bandit(eta=eta, q_init=(q0, 0.5))
        state = initial_state(spec)
        state.last_regime = 0
        update(spec, state, 0, reward)
        assert state.q[0, 0] == pytest.approx(expected)
        assert state.q[0, 1] == 0.5

    @pytest.mark.parametrize("eta", [0.05, 0.5, 1.0])
    def test_values_stay_in_unit_interval(self, eta):
        rng = np.random.default_rng(21)
        spec = _windowed(eta=eta, q_init=(0.0, 1.0))
        state = initial_state(spec)
        for reward, action, regime in zip(rng.integers(0, 2, 2000), rng.integers(0, 2, 2000),
                                          rng.integers(0, 2, 2000)):
            state.last_regime = int(regime)
            update(spec, state, int(action), int(reward))
            assert np.all((state.q >= 0.0) & (state.q <= 1.0))

    def test_static_encoder_is_unchanged(self):
        spec = StrategySpec(variant=StrategyVariant.STATIC_A0)
        state = initial_state(spec)
        before = state.q.copy()
        update(spec, state, 0, 1)
        assert np.array_equal(state.q, before)


class TestObserveQuery:

    @pytest.mark.parametrize("queries,eps_hat,regime", [
        ([0, 0, 0, 1], 0.25, 0),
        ([1, 1, 1, 0], -0.25, 1),
        ([0, 1], 0.0, 0),
    ])
    def test_window_regime(self, queries, eps_hat, regime):
        spec = _windowed(window=4)
        state = initial_state(spec)
        for y in queries:
            observe_query(spec, state, y)
        assert state.window_bias == pytest.approx(eps_hat)
        assert state.regime == regime

    def test_window_drops_oldest_query(self):
        spec = _windowed(window=4)
        state = initial_state(spec)
        for y in [0, 0, 0, 0, 1, 1, 1]:
            observe_query(spec, state, y)
        assert list(state.y_window) == [0, 1, 1, 1]
        assert state.zeros_in_window == 1
        assert state.regime == 1

    def test_plain_bandit_ignores_queries(self):
        spec = _bandit()
        state = initial_state(spec)
        observe_query(spec, state, 1)
        assert len(state.y_window) == 0
        assert state.regime == 0

    def test_update_uses_regime_row_of_the_choice(self):
        spec = _windowed(window=2, explore=0.0, eta=0.5)
        state = initial_state(spec)
        observe_query(spec, state, 1)
        assert state.regime == 1
        _, action, state = choose_message(spec, state, 0, 1, np.random.default_rng(0))
        observe_query(spec, state, 0)
        update(spec, state, action, 1)
        assert state.q[1, action] == pytest.approx(0.75)
        assert state.q[0].tolist() == [0.5, 0.5]


class TestDevice:

    def test_boundaries(self):
        rng = np.random.default_rng(0)
        always = StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=1.0)
        never = StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=0.0)
        assert all(device_outcome(always, rng) == 1 for _ in range(200))
        assert all(device_outcome(never, rng) == 0 for _ in range(200))

    def test_success_rate(self):
        spec = StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=0.85)
        rng = np.random.default_rng(5)
        draws = [device_outcome(spec, rng) for _ in range(100_000)]
        assert np.mean(draws) == pytest.approx(0.85, abs=0.0045)

    def test_requires_probability(self):
        with pytest.raises(ValidationError, match="p_success"):
            StrategySpec(variant=StrategyVariant.PARAM_DEVICE)


class TestPlayBlock:

    def _inputs(self, n=2000, seed=0):
        rng = np.random.default_rng(seed)
        return (rng.integers(0, 2, n).astype(np.int8), rng.integers(0, 2, n).astype(np.int8),
                rng.integers(0, 2, n).astype(np.int8))

    @pytest.mark.parametrize("variant", [
        StrategyVariant.STATIC_A0, StrategyVariant.STATIC_A1, StrategyVariant.BIAS_AWARE,
        StrategyVariant.BANDIT, StrategyVariant.WINDOWED_BANDIT,
    ])
    def test_decoder_outputs_the_message(self, variant):
        spec = StrategySpec(variant=variant)
        a0, a1, y = self._inputs()
        block = play_block(spec, initial_state(spec), a0, a1, y,
                           np.random.default_rng(1), np.random.default_rng(2))
        assert np.array_equal(block.b, block.m)
        sent = np.where(block.actions == 1, a1, a0)
        assert np.array_equal(block.m, sent)

    def test_greedy_bandit_with_favourable_start_plays_bias_aware(self):
        bandit = _bandit(explore=0.0, q_init=(1.0, 0.0))
        bias_aware = StrategySpec(variant=StrategyVariant.BIAS_AWARE, known_eps=0.1)
        a0, a1, y = self._inputs()
        learned = play_block(bandit, initial_state(bandit), a0, a1, y,
                             np.random.default_rng(3), np.random.default_rng(4))
        fixed = play_block(bias_aware, initial_state(bias_aware), a0, a1, y,
                           np.random.default_rng(3), np.random.default_rng(4))
        assert np.array_equal(learned.m, fixed.m)
        assert np.array_equal(learned.actions, fixed.actions)

    def test_bandit_is_reproducible(self):
        spec = _bandit()
        a0, a1, y = self._inputs()
        first = play_block(spec, initial_state(spec), a0, a1, y, np.random.default_rng(3), np.random.default_rng(4))
        second = play_block(spec, initial_state(spec), a0, a1, y, np.random.default_rng(3), np.random.default_rng(4))
        assert np.array_equal(first.actions, second.actions)

    def test_device_success_column(self):
        spec = StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=1.0)
        a0, a1, y = self._inputs()
        block = play_block(spec, initial_state(spec), a0, a1, y, np.random.default_rng(1), np.random.default_rng(2))
        assert np.array_equal(block.b, np.where(y == 0, a0, a1))
