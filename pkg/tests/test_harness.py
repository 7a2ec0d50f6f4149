import math
import os

import numpy as np
import pytest

from src.core.base.errors import DomainError
from src.core.harness import run_once, run_replicates, simulate, stress_postselect, sweep_bias, sweep_rounds
from src.core.harness.replicates import replicate_seeds, trailing_score
from src.core.harness.runner import preset_evaluation
from src.core.rac.rng import derive_seed
from src.core.rac.trace_io import read_trace
from src.core.rac.trial import ScoringMode
from src.core.schemas.run_config import (
    BenchmarkKind,
    BenchmarkMode,
    EpsMaxSource,
    InputModelSpec,
    InputVariant,
    RunConfig,
    SelectionSpec,
    SelectionVariant,
    StrategySpec,
    StrategyVariant,
)
from src.tools.rac_lab.figures import fig4_template, fig5_templates


def _config(n_rounds=2000, seed=1, eps=0.0, variant=StrategyVariant.STATIC_A0, **strategy):
    return RunConfig(
        n_rounds=n_rounds,
        seed=seed,
        input_model=InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=eps),
        strategy=StrategySpec(variant=variant, **strategy),
    )


def _device_config(n_rounds, p_success=0.86, eps_max=0.1):
    return RunConfig(
        n_rounds=n_rounds,
        strategy=StrategySpec(variant=StrategyVariant.PARAM_DEVICE, p_success=p_success),
        scoring=ScoringMode.UNCONDITIONAL,
        benchmark=BenchmarkMode(mode=BenchmarkKind.ROBUST, eps_max_source=EpsMaxSource.GIVEN, eps_max=eps_max),
    )


def _assert_tracks_ceiling(cell, trailing_window):
    ceiling = 0.75 + abs(cell.value) / 2
    sigma = math.sqrt(ceiling * (1 - ceiling) / (trailing_window * cell.m_reps))
    assert ceiling - 0.03 <= cell.mean_trailing <= ceiling + 3 * sigma


class TestRunOnce:

    def test_static_encoder_under_full_bias_is_perfect(self):
        _, report = run_once(_config(eps=0.5))
        assert report.s_uncond == 1.0

    def test_static_encoder_without_bias(self):
        _, report = run_once(_config(n_rounds=100_000, seed=5))
        assert report.s_uncond == pytest.approx(0.75, abs=0.006)

    def test_perfect_device(self):
        _, report = run_once(RunConfig(n_rounds=500, strategy=StrategySpec(
            variant=StrategyVariant.PARAM_DEVICE, p_success=1.0)))
        assert report.s_uncond == 1.0

    @pytest.mark.parametrize("variant", [StrategyVariant.BIAS_AWARE, StrategyVariant.BANDIT,
                                         StrategyVariant.WINDOWED_BANDIT])
    def test_decoder_outputs_message(self, variant):
        trace, _ = run_once(_config(eps=0.1, variant=variant))
        assert all(record.b == record.m for record in trace.rounds)

    def test_deterministic_given_seed(self):
        config = _config(variant=StrategyVariant.BANDIT)
        first, second = simulate(config), simulate(config)
        assert np.array_equal(first.trace.m, second.trace.m)
        assert first.strategy_state.q_table() == second.strategy_state.q_table()

    def test_inputs_do_not_depend_on_strategy(self):
        static = simulate(_config(seed=3))
        bandit = simulate(_config(seed=3, variant=StrategyVariant.BANDIT))
        assert np.array_equal(static.trace.y, bandit.trace.y)
        assert np.array_equal(static.trace.a0, bandit.trace.a0)

    def test_schedule_and_tag(self):
        config = _config(eps=0.1)
        simulation = simulate(config)
        assert simulation.schedule.shape == (config.n_rounds,)
        assert np.all(simulation.schedule == 0.1)
        assert simulation.trace.model_tag == config.model_tag == "iid(eps=0.1)|static_a0|keep_all"

    def test_nonstationary_benchmark_uses_simulated_schedule(self):
        config = RunConfig(n_rounds=4000, input_model=InputModelSpec(
            variant=InputVariant.DRIFT_SINE, epsilon0=0.0, amp=0.1, period=1000))
        evaluation = preset_evaluation("ALIGNED", config)
        _, report = run_once(config.evolve(scoring=evaluation.scoring, benchmark=evaluation.benchmark))
        # mean |sin| over whole periods is 2/pi
        assert report.benchmark_value == pytest.approx(0.75 + 0.1 * (2 / math.pi) / 2, abs=1e-4)


class TestReplicates:

    def test_seeds_are_distinct_and_derived(self):
        seeds = replicate_seeds(5, 50)
        assert len(set(seeds)) == 50
        assert seeds[3] == derive_seed(5, 3)
        assert replicate_seeds(6, 3) != replicate_seeds(5, 3)

    def test_single_replicate_matches_run_once(self):
        config = _config(eps=0.1, variant=StrategyVariant.BIAS_AWARE, known_eps=0.1)
        cell = run_replicates(config, 1, base_seed=4)
        _, report = run_once(config.evolve(seed=derive_seed(4, 0)))
        stats = cell.evaluations["configured"]
        assert cell.mean_s_uncond == report.s_uncond
        assert stats.mean_s_low == report.s_low
        assert stats.accept_rate == (1.0 if report.verdict.value == "ACCEPT" else 0.0)
        assert stats.accept_se == 0.0

    def test_identical_inputs_give_identical_cells(self):
        config = _config(variant=StrategyVariant.BANDIT)
        first = run_replicates(config, 4, base_seed=9)
        second = run_replicates(config, 4, base_seed=9)
        assert first == second

    def test_results_do_not_depend_on_workers(self):
        config = _config(n_rounds=500, variant=StrategyVariant.BANDIT)
        serial = run_replicates(config, 4, base_seed=2, workers=1)
        parallel = run_replicates(config, 4, base_seed=2, workers=2)
        assert serial == parallel

    def test_requires_replicates(self):
        with pytest.raises(DomainError, match="m_reps"):
            run_replicates(_config(), 0, base_seed=0)

    def test_trailing_score(self, make_trace):
        trace = make_trace([0, 0, 1, 1, 1, 0], kept=[1, 1, 1, 1, 0, 1])
        assert trailing_score(trace, 4) == pytest.approx(2 / 4)
        assert trailing_score(trace, 100) == pytest.approx(2 / 6)

    def test_writes_replicate_traces(self, tmp_path):
        config = _config(n_rounds=50)
        run_replicates(config, 2, base_seed=0, trace_dir=str(tmp_path))
        path = os.path.join(str(tmp_path), "replicate_00001.jsonl")
        trace = read_trace(path)
        assert len(trace) == 50
        assert trace.seed == derive_seed(0, 1)

    def test_aligned_evaluation_stays_sound(self):
        config = _config(n_rounds=2000, eps=0.1, variant=StrategyVariant.BIAS_AWARE, known_eps=0.1)
        cell = run_replicates(config, 100, base_seed=0, evaluations=[preset_evaluation("ALIGNED", config)])
        assert cell.evaluations["aligned"].accept_rate <= 0.07

    def test_param_device_beats_robust_benchmark(self):
        cell = run_replicates(_device_config(10_000), 10, base_seed=0)
        stats = cell.evaluations["configured"]
        assert stats.benchmark == pytest.approx(0.80)
        assert stats.accept_rate == 1.0

    def test_aligned_gap_closes_with_more_rounds(self):
        medians = []
        for n_rounds in (1000, 10_000, 100_000):
            config = _config(n_rounds=n_rounds, eps=0.1, variant=StrategyVariant.BIAS_AWARE, known_eps=0.1)
            cell = run_replicates(config, 20, base_seed=0, evaluations=[preset_evaluation("ALIGNED", config)])
            medians.append(cell.evaluations["aligned"].median_delta_rob)
        assert medians == sorted(medians)
        assert all(median < 0 for median in medians)

    def test_careless_acceptance_grows_with_rounds(self):
        rates = []
        for n_rounds in (100, 300, 3000):
            config = _config(n_rounds=n_rounds, eps=0.15, variant=StrategyVariant.BIAS_AWARE, known_eps=0.15)
            cell = run_replicates(config, 50, base_seed=0, evaluations=[preset_evaluation("CARELESS", config)])
            rates.append(cell.evaluations["careless"].accept_rate)
        assert rates == sorted(rates)
        assert rates[0] < 0.5
        assert rates[-1] == 1.0


class TestSweeps:

    def test_zero_bias_benchmarks_coincide(self):
        result = sweep_bias([0.0], _config(variant=StrategyVariant.BIAS_AWARE), 2)
        cell = result.cells[0]
        assert cell.evaluations["nominal"].benchmark == cell.evaluations["effective"].benchmark == 0.75

    def test_bias_aware_tracks_effective_ceiling(self):
        grid = [0.0, 0.1, 0.2]
        result = sweep_bias(grid, _config(n_rounds=20_000, variant=StrategyVariant.BIAS_AWARE), 4)
        assert [cell.value for cell in result.cells] == grid
        for cell in result.cells:
            assert cell.mean_s_uncond == pytest.approx(0.75 + cell.value / 2, abs=0.01)
            assert cell.label == f"bias_aware(eps={cell.value:g})"
        assert result.cell(0.2).evaluations["nominal"].accept_rate == 1.0
        assert result.cell(0.2).evaluations["effective"].accept_rate == 0.0

    def test_bandit_stays_below_effective_ceiling(self):
        grid = [0.0, 0.15]
        result = sweep_bias(grid, _config(n_rounds=3000, variant=StrategyVariant.BANDIT), 3)
        for cell in result.cells:
            ceiling = 0.75 + cell.value / 2
            sigma = math.sqrt(ceiling * (1 - ceiling) / (3000 * 3))
            assert cell.mean_s_uncond <= ceiling + 3 * sigma

    def test_bandit_recovers_effective_ceiling(self):
        template = _config(n_rounds=20_000, variant=StrategyVariant.BANDIT, eta=0.05, explore=0.05)
        result = sweep_bias([0.05, 0.1], template, 5, trailing_window=10_000)
        for cell in result.cells:
            _assert_tracks_ceiling(cell, 10_000)
            effective = cell.evaluations["effective"]
            assert effective.median_delta_rob < 0
            assert effective.accept_rate == 0.0

    def test_bias_grid_validated(self):
        with pytest.raises(DomainError, match="bias grid"):
            sweep_bias([0.6], _config(), 2)

    def test_sweep_rounds_validation(self):
        with pytest.raises(DomainError, match=">= 10"):
            sweep_rounds([5], [_config()], 2)
        with pytest.raises(DomainError, match="at least one template"):
            sweep_rounds([100], [], 2)

    def test_sweep_rounds_cells(self):
        templates = [_config(), _config(variant=StrategyVariant.BANDIT)]
        result = sweep_rounds([100, 200], templates, 2)
        assert [(cell.value, cell.label) for cell in result.cells] == [
            (100.0, "static_a0"), (100.0, templates[1].strategy.tag()),
            (200.0, "static_a0"), (200.0, templates[1].strategy.tag()),
        ]
        assert set(result.cells[0].evaluations) == {"careless", "aligned"}
        assert all(cell.base_seed == 0 for cell in result.cells)

    def test_stress_postselect(self):
        result = stress_postselect([0.0, 0.3], fig4_template(0.1, 5000), 3)
        clean, heavy = result.cells
        assert clean.evaluations["careless"].accept_rate == 1.0
        assert heavy.mean_s_cond == 1.0
        assert heavy.evaluations["careless"].accept_rate == 1.0
        assert heavy.evaluations["aligned"].accept_rate == 0.0
        # every failure and 1500 - failures successes discarded
        assert heavy.mean_s_uncond == pytest.approx(3500 / 5000)

    def test_discard_fraction_validated(self):
        with pytest.raises(DomainError, match="discard fractions"):
            stress_postselect([1.0], _config(), 2)

    def test_cell_rows(self):
        result = sweep_bias([0.1], _config(n_rounds=100), 2)
        row = result.to_rows()[0]
        assert row["axis"] == "eps"
        assert row["value"] == 0.1
        assert "nominal_accept_rate" in row and "effective_mean_delta_rob" in row
        assert "nominal_m_reps" not in row
        assert result.columns()[:3] == ["axis", "value", "label"]


@pytest.mark.slow
def test_adaptive_encoders_are_careless_accepted_more_often():
    templates = fig5_templates(epsilon0=0.0, amp=0.1, period=4000, discard_fraction=0.005)
    result = sweep_rounds([20_000], templates, 500)
    static, _, windowed = result.cells
    careless_static = static.evaluations["careless"]
    careless_windowed = windowed.evaluations["careless"]
    gap = careless_windowed.accept_rate - careless_static.accept_rate
    combined_se = math.hypot(careless_windowed.accept_se, careless_static.accept_se)
    assert gap > 2 * combined_se
    for cell in result.cells:
        aligned = cell.evaluations["aligned"]
        assert aligned.median_delta_rob < 0
        assert aligned.accept_rate <= 0.05 + 2 * max(aligned.accept_se, math.sqrt(0.05 * 0.95 / 500))


@pytest.mark.slow
def test_bandit_recovers_effective_ceiling_full_size():
    template = _config(n_rounds=100_000, variant=StrategyVariant.BANDIT, eta=0.05, explore=0.05)
    result = sweep_bias([0.0, 0.05, 0.1, 0.15, 0.2], template, 100, trailing_window=10_000)
    for cell in result.cells:
        _assert_tracks_ceiling(cell, 10_000)
        # Delta_rob < 0 in at least 95% of replicates
        assert cell.evaluations["effective"].accept_rate <= 0.05


@pytest.mark.slow
def test_param_device_beats_robust_benchmark_full_size():
    cell = run_replicates(_device_config(100_000), 100, base_seed=0)
    stats = cell.evaluations["configured"]
    assert stats.benchmark == pytest.approx(0.80)
    assert stats.accept_rate >= 0.95


@pytest.mark.slow
@pytest.mark.parametrize("strategy", [
    StrategySpec(variant=StrategyVariant.STATIC_A0),
    StrategySpec(variant=StrategyVariant.STATIC_A1),
    StrategySpec(variant=StrategyVariant.BIAS_AWARE, known_eps=0.1),
    StrategySpec(variant=StrategyVariant.BANDIT),
    StrategySpec(variant=StrategyVariant.WINDOWED_BANDIT),
], ids=lambda spec: spec.variant.value)
@pytest.mark.parametrize("input_model", [
    InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=0.1),
    InputModelSpec(variant=InputVariant.MARKOV, p00=0.7, p10=0.5),
    InputModelSpec(variant=InputVariant.DRIFT_SINE, epsilon0=0.05, amp=0.07, period=4000),
    InputModelSpec(variant=InputVariant.DRIFT_WALK, epsilon0=0.05, step=0.005, bound=0.15),
], ids=lambda model: model.variant.value)
@pytest.mark.parametrize("selection", [
    SelectionSpec(variant=SelectionVariant.NONE),
    SelectionSpec(variant=SelectionVariant.RANDOM, discard_fraction=0.05),
    SelectionSpec(variant=SelectionVariant.ADVERSARIAL, discard_fraction=0.05),
], ids=lambda spec: spec.variant.value)
def test_aligned_soundness_full_size(strategy, input_model, selection):
    config = RunConfig(n_rounds=20_000, input_model=input_model, strategy=strategy, selection=selection)
    cell = run_replicates(config, 200, base_seed=0, evaluations=[preset_evaluation("ALIGNED", config)])
    assert cell.evaluations["aligned"].accept_rate <= 0.05 + 0.03
