"""Canned experiment families for ``reproduce``.

Each figure names the sweep it runs, the template configuration(s), the CSV
columns that suffice to redraw its curves, and how its SVG is drawn.
Replicate counts, grids and the drift regime come from the
``rac_lab.figures`` section of the settings.
"""
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.base.errors import DomainError
from src.core.harness.sweeps import stress_postselect, sweep_bias, sweep_rounds
from src.core.rac.trial import ScoringMode
from src.core.schemas.run_config import (
    BenchmarkKind,
    BenchmarkMode,
    ConfidenceParams,
    InputModelSpec,
    InputVariant,
    RunConfig,
    SelectionSpec,
    SelectionVariant,
    StrategySpec,
    StrategyVariant,
)
from src.core.schemas.sweep import SweepResult


@dataclass(frozen=True)
class FigureSpec:
    name: str
    description: str
    columns: Tuple[str, ...]
    x: str
    series: Tuple[Tuple[str, str], ...]
    references: Tuple[Tuple[str, str], ...] = ()
    group_by: Optional[str] = None
    ylabel: str = "score"
    logx: bool = False


FIGURES: Dict[str, FigureSpec] = {
    "fig2": FigureSpec(
        name="fig2",
        description="Benchmark misalignment: bias-aware encoder against nominal and effective ceilings",
        columns=("value", "m_reps", "n_rounds", "mean_s_uncond", "nominal_mean_s_low", "nominal_benchmark",
                 "nominal_accept_rate", "effective_benchmark", "effective_mean_delta_rob",
                 "effective_accept_rate"),
        x="value",
        series=(("mean_s_uncond", "mean score"), ("nominal_mean_s_low", "lower bound")),
        references=(("nominal_benchmark", "nominal 3/4"), ("effective_benchmark", "effective ceiling")),
    ),
    "fig3": FigureSpec(
        name="fig3",
        description="Bandit learner recovers the effective ceiling of the bias-aware encoder",
        columns=("value", "label", "m_reps", "n_rounds", "mean_s_uncond", "mean_trailing", "effective_mean_s_low",
                 "effective_benchmark", "effective_mean_delta_rob", "effective_median_delta_rob",
                 "effective_accept_rate"),
        x="value",
        series=(("mean_trailing", "trailing score"), ("mean_s_uncond", "mean score"),
                ("effective_mean_s_low", "lower bound")),
        references=(("effective_benchmark", "effective ceiling"),),
        group_by="label",
    ),
    "fig4": FigureSpec(
        name="fig4",
        description="Postselection stress test: conditional vs unconditional scoring",
        columns=("value", "m_reps", "n_rounds", "mean_s_uncond", "mean_s_cond", "careless_benchmark",
                 "careless_accept_rate", "aligned_benchmark", "aligned_mean_delta_rob",
                 "aligned_accept_rate"),
        x="value",
        series=(("mean_s_cond", "conditional score"), ("mean_s_uncond", "unconditional score")),
        references=(("careless_benchmark", "nominal 3/4"), ("aligned_benchmark", "effective ceiling")),
    ),
    "fig5": FigureSpec(
        name="fig5",
        description="Memory amplifies misalignment: careless acceptance of static vs adaptive encoders",
        columns=("value", "label", "m_reps", "careless_accept_rate", "careless_accept_se",
                 "aligned_accept_rate", "aligned_accept_se", "aligned_median_delta_rob",
                 "aligned_mean_delta_rob"),
        x="value",
        series=(("careless_accept_rate", "careless acceptance"), ("aligned_accept_rate", "aligned acceptance")),
        group_by="label",
        ylabel="acceptance rate",
        logx=True,
    ),
}


def get_figure(name: str) -> FigureSpec:
    try:
        return FIGURES[name]
    except KeyError:
        raise DomainError(f"unknown figure '{name}' (known: {', '.join(sorted(FIGURES))})") from None


def _confidence(alpha: float) -> ConfidenceParams:
    return ConfidenceParams(alpha=alpha)


def fig2_template(n_rounds: int, alpha: float = 0.05) -> RunConfig:
    return RunConfig(n_rounds=n_rounds, strategy=StrategySpec(variant=StrategyVariant.BIAS_AWARE),
                     scoring=ScoringMode.UNCONDITIONAL, confidence=_confidence(alpha))


def fig3_templates(n_rounds: int, alpha: float = 0.05, eta: float = 0.05,
                   explore: float = 0.05) -> List[RunConfig]:
    """The bias-aware encoder as reference and the bandit that has to learn it."""
    strategies = [
        StrategySpec(variant=StrategyVariant.BIAS_AWARE),
        StrategySpec(variant=StrategyVariant.BANDIT, eta=eta, explore=explore),
    ]
    return [RunConfig(n_rounds=n_rounds, strategy=strategy, scoring=ScoringMode.UNCONDITIONAL,
                      confidence=_confidence(alpha))
            for strategy in strategies]


def fig4_template(eps: float, n_rounds: int, alpha: float = 0.05) -> RunConfig:
    return RunConfig(n_rounds=n_rounds,
                     input_model=InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=eps),
                     strategy=StrategySpec(variant=StrategyVariant.BIAS_AWARE, known_eps=eps),
                     confidence=_confidence(alpha))


def fig5_templates(epsilon0: float, amp: float, period: float, discard_fraction: float,
                   alpha: float = 0.05, window: int = 200) -> List[RunConfig]:
    """Static, bandit and windowed-bandit encoders under one drifting, lightly postselected regime."""
    input_model = InputModelSpec(variant=InputVariant.DRIFT_SINE, epsilon0=epsilon0, amp=amp, period=period)
    selection = SelectionSpec(variant=SelectionVariant.ADVERSARIAL, discard_fraction=discard_fraction)
    strategies = [
        StrategySpec(variant=StrategyVariant.STATIC_A0),
        StrategySpec(variant=StrategyVariant.BANDIT, eta=0.05, explore=0.05),
        StrategySpec(variant=StrategyVariant.WINDOWED_BANDIT, eta=0.05, explore=0.05, window=window),
    ]
    return [RunConfig(input_model=input_model, strategy=strategy, selection=selection,
                      benchmark=BenchmarkMode(mode=BenchmarkKind.NONSTATIONARY), confidence=_confidence(alpha))
            for strategy in strategies]


def run_figure(name: str, settings: Dict, m_reps: Optional[int] = None, n_rounds: Optional[int] = None,
               base_seed: int = 0, workers: int = 1, alpha: float = 0.05,
               trace_dir: Optional[str] = None) -> SweepResult:
    """Runs the canned sweep of figure ``name`` with ``settings`` from ``rac_lab.figures.<name>``.

    ``m_reps`` and ``n_rounds`` override the settings; for fig5 ``n_rounds``
    replaces the round grid with that single value.
    """
    get_figure(name)
    reps = int(m_reps or settings.get("m_reps", 20))
    common = dict(base_seed=base_seed, workers=workers, trace_dir=trace_dir)
    if name in ("fig2", "fig3"):
        rounds = int(n_rounds or settings.get("n_rounds", 100000))
        grid: Sequence[float] = settings.get("eps_grid", [0.0, 0.05, 0.1, 0.15, 0.2])
        if name == "fig2":
            return sweep_bias(grid, fig2_template(rounds, alpha), reps, **common)
        cells = []
        for template in fig3_templates(rounds, alpha):
            label = template.strategy.variant.value.lower()
            result = sweep_bias(grid, template, reps, base_seed=base_seed, workers=workers,
                                trace_dir=os.path.join(trace_dir, label) if trace_dir else None)
            cells += [cell.evolve(label=label) for cell in result.cells]
        return SweepResult(name="sweep_bias", cells=cells)
    if name == "fig4":
        rounds = int(n_rounds or settings.get("n_rounds", 20000))
        template = fig4_template(float(settings.get("eps", 0.1)), rounds, alpha)
        return stress_postselect(settings.get("f_grid", [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]),
                                 template, reps, **common)
    n_grid = [int(n_rounds)] if n_rounds else [int(n) for n in settings.get("n_grid", [1000, 2000, 5000, 10000, 20000])]
    templates = fig5_templates(
        epsilon0=float(settings.get("epsilon0", 0.0)),
        amp=float(settings.get("amp", 0.1)),
        period=float(settings.get("period", 4000)),
        discard_fraction=float(settings.get("discard_fraction", 0.005)),
        alpha=alpha,
        window=int(settings.get("window", 200)),
    )
    return sweep_rounds(n_grid, templates, reps, **common)
