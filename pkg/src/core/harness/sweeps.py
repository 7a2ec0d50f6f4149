"""Parameter sweeps over the query bias, the round count and the discard fraction.

All cells of one sweep share ``base_seed``, so neighbouring cells are driven
by the same replicate seeds.
"""
import os
from typing import List, Optional, Sequence

from src.core.base.errors import DomainError
from src.core.harness.replicates import run_replicates
from src.core.harness.runner import preset_evaluation
from src.core.logging.setup import get_logger
from src.core.rac.trial import ScoringMode
from src.core.schemas.run_config import (
    BenchmarkKind,
    BenchmarkMode,
    InputModelSpec,
    InputVariant,
    RunConfig,
    SelectionSpec,
    SelectionVariant,
    StrategyVariant,
)
from src.core.schemas.sweep import EvaluationSpec, SweepResult

logger = get_logger(__name__)

MIN_SWEEP_ROUNDS = 10


def _cell_dir(trace_dir: Optional[str], name: str) -> Optional[str]:
    return os.path.join(trace_dir, name) if trace_dir else None


def bias_evaluations(eps: float, scoring: ScoringMode = ScoringMode.UNCONDITIONAL) -> List[EvaluationSpec]:
    """NOMINAL and EFFECTIVE benchmarks for a trace drawn with query bias ``eps``."""
    return [
        EvaluationSpec(name="nominal", scoring=scoring, benchmark=BenchmarkMode(mode=BenchmarkKind.NOMINAL)),
        EvaluationSpec(name="effective", scoring=scoring,
                       benchmark=BenchmarkMode(mode=BenchmarkKind.EFFECTIVE, known_eps=eps)),
    ]


def sweep_bias(eps_grid: Sequence[float], template: RunConfig, m_reps: int, base_seed: int = 0,
               workers: int = 1, trailing_window: Optional[int] = None,
               trace_dir: Optional[str] = None) -> SweepResult:
    """One cell per bias value with NOMINAL and EFFECTIVE benchmarks evaluated on the same traces.

    The template's input model is replaced by IID queries at each bias; a
    BIAS_AWARE strategy is handed the true bias.
    """
    for eps in eps_grid:
        if abs(eps) > 0.5:
            raise DomainError(f"bias grid values must satisfy |eps| <= 1/2, got {eps}")

    cells = []
    for eps in eps_grid:
        strategy = template.strategy
        if strategy.variant is StrategyVariant.BIAS_AWARE:
            strategy = strategy.evolve(known_eps=eps)
        config = template.evolve(input_model=InputModelSpec(variant=InputVariant.IID_BIAS, epsilon=eps),
                                 strategy=strategy)
        cell = run_replicates(config, m_reps, base_seed, bias_evaluations(eps, template.scoring),
                              workers=workers, trailing_window=trailing_window,
                              axis="eps", value=float(eps), label=strategy.tag(),
                              trace_dir=_cell_dir(trace_dir, f"eps_{eps:g}"))
        logger.info(f"eps={eps:g} {strategy.tag()}: mean score {cell.mean_s_uncond:.4f}, "
                    f"nominal accept {cell.evaluations['nominal'].accept_rate:.3f}, "
                    f"effective accept {cell.evaluations['effective'].accept_rate:.3f}")
        cells.append(cell)
    return SweepResult(name="sweep_bias", cells=cells)


def sweep_rounds(n_grid: Sequence[int], templates: Sequence[RunConfig], m_reps: int, base_seed: int = 0,
                 workers: int = 1, trailing_window: Optional[int] = None,
                 trace_dir: Optional[str] = None) -> SweepResult:
    """CARELESS and ALIGNED statistics per round count for each strategy template.

    Templates share everything but the strategy in the intended use (a static
    and an adaptive encoder under one drifting, postselected regime); cells
    are labelled with the strategy tag.
    """
    for n in n_grid:
        if n < MIN_SWEEP_ROUNDS:
            raise DomainError(f"round counts must be >= {MIN_SWEEP_ROUNDS}, got {n}")
    if not templates:
        raise DomainError("sweep_rounds needs at least one template")

    cells = []
    for n in n_grid:
        for index, template in enumerate(templates):
            config = template.evolve(n_rounds=int(n))
            evaluations = [preset_evaluation("CARELESS", config), preset_evaluation("ALIGNED", config)]
            cell = run_replicates(config, m_reps, base_seed, evaluations, workers=workers,
                                  trailing_window=trailing_window, axis="n_rounds", value=float(n),
                                  label=config.strategy.tag(),
                                  trace_dir=_cell_dir(trace_dir, f"n_{n}_strategy_{index}"))
            logger.info(f"N={n} {config.strategy.tag()}: careless accept "
                        f"{cell.evaluations['careless'].accept_rate:.3f}, aligned accept "
                        f"{cell.evaluations['aligned'].accept_rate:.3f}")
            cells.append(cell)
    return SweepResult(name="sweep_rounds", cells=cells)


def stress_postselect(f_grid: Sequence[float], template: RunConfig, m_reps: int, base_seed: int = 0,
                      workers: int = 1, trailing_window: Optional[int] = None,
                      trace_dir: Optional[str] = None) -> SweepResult:
    """ADVERSARIAL selection at each discard fraction, evaluated CARELESS and ALIGNED on the same traces."""
    for f in f_grid:
        if not 0.0 <= f < 1.0:
            raise DomainError(f"discard fractions must lie in [0, 1), got {f}")

    cells = []
    for f in f_grid:
        selection = SelectionSpec(variant=SelectionVariant.ADVERSARIAL, discard_fraction=f)
        config = template.evolve(selection=selection)
        evaluations = [preset_evaluation("CARELESS", config), preset_evaluation("ALIGNED", config)]
        cell = run_replicates(config, m_reps, base_seed, evaluations, workers=workers,
                              trailing_window=trailing_window, axis="discard_fraction", value=float(f),
                              label=config.strategy.tag(), trace_dir=_cell_dir(trace_dir, f"f_{f:g}"))
        logger.info(f"f={f:g}: careless accept {cell.evaluations['careless'].accept_rate:.3f}, "
                    f"aligned accept {cell.evaluations['aligned'].accept_rate:.3f}")
        cells.append(cell)
    return SweepResult(name="stress_postselect", cells=cells)
