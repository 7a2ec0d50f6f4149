import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.base.errors import DomainError
from src.core.rac.inputs import (
    bias_at,
    generate_inputs,
    initial_state,
    markov_from_stay,
    next_inputs,
    stationary_bias,
)
from src.core.schemas.run_config import InputModelSpec, InputVariant


def _sine(epsilon0, amp, period):
    return InputModelSpec(variant=InputVariant.DRIFT_SINE, epsilon0=epsilon0, amp=amp, period=period)


class TestStationaryBias:

    def test_examples(self):
        assert stationary_bias(0.7, 0.5) == pytest.approx(0.125)
        assert stationary_bias(0.5, 0.5) == pytest.approx(0.0)

    def test_reducible_chain(self):
        with pytest.raises(DomainError, match="reducible"):
            stationary_bias(1.0, 0.0)


class TestMarkovFromStay:

    def test_reaches_target(self):
        p00, p10 = markov_from_stay(0.7, 0.125)
        assert p00 == 0.7
        assert p10 == pytest.approx(0.5)
        assert stationary_bias(p00, p10) == pytest.approx(0.125)

    def test_infeasible_pair(self):
        with pytest.raises(DomainError, match="infeasible"):
            markov_from_stay(0.0, 0.4)


class TestBiasAt:

    def test_examples(self):
        assert bias_at(_sine(0.1, 0.05, 4), 1) == pytest.approx(0.15)
        assert bias_at(_sine(0.1, 0.05, 4), 2) == pytest.approx(0.1)

    def test_clips_at_boundary(self):
        # epsilon0 + amp may not exceed 1/2 in a validated spec
        spec = _sine(0.45, 0.05, 4).model_copy(update={"amp": 0.1})
        assert bias_at(spec, 1) == 0.5

    def test_requires_sine_drift(self):
        with pytest.raises(DomainError, match="DRIFT_SINE"):
            bias_at(InputModelSpec(), 1)


class TestInputModelSpec:

    def test_iid_bias_out_of_range(self):
        with pytest.raises(ValidationError, match="epsilon"):
            InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=0.6)

    def test_reducible_markov_rejected(self):
        with pytest.raises(ValidationError, match="reducible"):
            InputModelSpec(variant=InputVariant.MARKOV, p00=1.0, p10=0.0)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            InputModelSpec(variant=InputVariant.IID_BIAS, epsilom=0.1)


class TestGenerateInputs:

    def test_full_bias_always_queries_a0(self):
        spec = InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=0.5)
        block = generate_inputs(spec, 5000, np.random.default_rng(1))
        assert block.y.sum() == 0

    def test_unbiased_query_frequency(self):
        block = generate_inputs(InputModelSpec(), 100_000, np.random.default_rng(2))
        assert np.mean(block.y == 0) == pytest.approx(0.5, abs=0.01)

    def test_preparation_bits_are_fair(self):
        block = generate_inputs(InputModelSpec(), 100_000, np.random.default_rng(4))
        assert block.a0.mean() == pytest.approx(0.5, abs=0.01)
        assert block.a1.mean() == pytest.approx(0.5, abs=0.01)

    def test_markov_long_run_frequency(self):
        spec = InputModelSpec(variant=InputVariant.MARKOV, p00=0.7, p10=0.5)
        block = generate_inputs(spec, 100_000, np.random.default_rng(3))
        assert np.mean(block.y == 0) == pytest.approx(0.625, abs=0.01)

    def test_markov_schedule_follows_previous_query(self):
        spec = InputModelSpec(variant=InputVariant.MARKOV, p00=0.7, p10=0.5)
        block = generate_inputs(spec, 200, np.random.default_rng(5))
        assert block.eps[0] == pytest.approx(0.125)
        expected = np.where(block.y[:-1] == 0, 0.2, 0.0)
        np.testing.assert_allclose(block.eps[1:], expected)

    def test_sine_schedule(self):
        spec = _sine(0.1, 0.05, 8)
        block = generate_inputs(spec, 16, np.random.default_rng(0))
        expected = [0.1 + 0.05 * math.sin(2 * math.pi * t / 8) for t in range(1, 17)]
        np.testing.assert_allclose(block.eps, expected)

    def test_walk_stays_within_bound(self):
        spec = InputModelSpec(variant=InputVariant.DRIFT_WALK, epsilon0=0.0, step=0.05, bound=0.2)
        block = generate_inputs(spec, 5000, np.random.default_rng(6))
        assert np.all(np.abs(block.eps) <= 0.2 + 1e-12)
        assert block.eps[0] == 0.0

    @pytest.mark.parametrize("spec", [
        InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=0.2),
        InputModelSpec(variant=InputVariant.MARKOV, p00=0.8, p10=0.3),
        InputModelSpec(variant=InputVariant.DRIFT_SINE, epsilon0=0.05, amp=0.1, period=500),
        InputModelSpec(variant=InputVariant.DRIFT_WALK, epsilon0=0.1, step=0.02, bound=0.3),
    ])
    def test_preparation_is_independent_of_query(self, spec):
        n = 50_000
        block = generate_inputs(spec, n, np.random.default_rng(8))
        limit = 4 / math.sqrt(n)
        for bits in (block.a0, block.a1):
            assert abs(np.corrcoef(bits, block.y)[0, 1]) < limit

    def test_requires_rounds(self):
        with pytest.raises(DomainError, match="at least one round"):
            generate_inputs(InputModelSpec(), 0, np.random.default_rng(0))

    @pytest.mark.parametrize("spec", [
        InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=0.15),
        InputModelSpec(variant=InputVariant.MARKOV, p00=0.8, p10=0.3),
        InputModelSpec(variant=InputVariant.DRIFT_SINE, epsilon0=0.05, amp=0.1, period=50),
        InputModelSpec(variant=InputVariant.DRIFT_WALK, epsilon0=0.1, step=0.02, bound=0.3),
    ])
    def test_block_matches_step_by_step(self, spec):
        n = 500
        block = generate_inputs(spec, n, np.random.default_rng(11))
        rng = np.random.default_rng(11)
        state = initial_state(spec)
        steps = []
        for _ in range(n):
            a0, a1, y, state = next_inputs(spec, state, rng)
            steps.append((a0, a1, y))
        a0, a1, y = (np.array(column) for column in zip(*steps))
        assert np.array_equal(block.a0, a0)
        assert np.array_equal(block.a1, a1)
        assert np.array_equal(block.y, y)
