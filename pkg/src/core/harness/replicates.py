"""Monte Carlo replicate studies.

Replicate ``i`` runs the template config with seed ``derive_seed(base_seed, i)``.
Outcomes are sorted by replicate index before aggregation, so a cell does not
depend on the number of worker processes.
"""
import math
import os
from multiprocessing import Pool
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.base.errors import DomainError
from src.core.config.loader import get_config
from src.core.harness.runner import configured_evaluation, evaluate, simulate
from src.core.logging.setup import get_logger
from src.core.rac.rng import derive_seed
from src.core.rac.trace_io import write_trace_jsonl
from src.core.rac.trial import Trace, score_conditional, score_unconditional
from src.core.schemas.report import Verdict
from src.core.schemas.run_config import RunConfig
from src.core.schemas.sweep import CellStats, EvaluationSpec, SweepCell

logger = get_logger(__name__)


class EvaluationOutcome(NamedTuple):
    score: float
    s_low: float
    benchmark: float
    delta_rob: float
    accepted: bool


class ReplicateOutcome(NamedTuple):
    index: int
    seed: int
    s_uncond: float
    s_cond: Optional[float]
    trailing: float
    evaluations: Dict[str, EvaluationOutcome]


def trailing_score(trace: Trace, window: int) -> float:
    """Mean of ``kept * x`` over the last ``min(window, N)`` rounds."""
    n = len(trace)
    width = max(1, min(int(window), n))
    tail = trace.kept[n - width:].astype(np.int64) * trace.x[n - width:].astype(np.int64)
    return float(tail.sum()) / width


def replicate_seeds(base_seed: int, m_reps: int) -> List[int]:
    return [derive_seed(base_seed, index) for index in range(m_reps)]


ReplicateTask = Tuple[RunConfig, int, int, Tuple[EvaluationSpec, ...], int, Optional[str]]


def _run_replicate(task: ReplicateTask) -> ReplicateOutcome:
    config, index, seed, evaluations, trailing_window, trace_dir = task
    config = config.model_copy(update={'seed': seed})
    simulation = simulate(config)
    trace = simulation.trace
    if trace_dir:
        write_trace_jsonl(os.path.join(trace_dir, f"replicate_{index:05d}.jsonl"), trace)
    outcomes: Dict[str, EvaluationOutcome] = {}
    for evaluation in evaluations:
        report = evaluate(simulation, evaluation, config)
        outcomes[evaluation.name] = EvaluationOutcome(
            score=report.score,
            s_low=report.s_low,
            benchmark=report.benchmark_value,
            delta_rob=report.delta_rob,
            accepted=report.verdict is Verdict.ACCEPT,
        )
    s_cond = score_conditional(trace) if trace.n_kept else None
    return ReplicateOutcome(
        index=index,
        seed=seed,
        s_uncond=score_unconditional(trace),
        s_cond=s_cond,
        trailing=trailing_score(trace, trailing_window),
        evaluations=outcomes,
    )


def aggregate(outcomes: Sequence[ReplicateOutcome], evaluations: Sequence[EvaluationSpec]) -> Dict[str, CellStats]:
    """Per-evaluation means, medians and binomial acceptance statistics over index-sorted outcomes."""
    ordered = sorted(outcomes, key=lambda outcome: outcome.index)
    m_reps = len(ordered)
    stats: Dict[str, CellStats] = {}
    for evaluation in evaluations:
        rows = [outcome.evaluations[evaluation.name] for outcome in ordered]
        delta = np.array([row.delta_rob for row in rows])
        rate = sum(1 for row in rows if row.accepted) / m_reps
        stats[evaluation.name] = CellStats(
            mean_score=float(np.mean([row.score for row in rows])),
            mean_s_low=float(np.mean([row.s_low for row in rows])),
            benchmark=float(np.mean([row.benchmark for row in rows])),
            mean_delta_rob=float(np.mean(delta)),
            median_delta_rob=float(np.median(delta)),
            accept_rate=rate,
            accept_se=math.sqrt(rate * (1.0 - rate) / m_reps),
            m_reps=m_reps,
        )
    return stats


def collect_outcomes(config: RunConfig, m_reps: int, base_seed: int,
                     evaluations: Sequence[EvaluationSpec], workers: int = 1,
                     trailing_window: Optional[int] = None, trace_dir: Optional[str] = None) -> List[ReplicateOutcome]:
    """Runs ``m_reps`` replicates and returns their outcomes sorted by replicate index."""
    if m_reps < 1:
        raise DomainError(f"m_reps must be >= 1, got {m_reps}")
    if trailing_window is None:
        trailing_window = int(get_config('harness.trailing_window', 10000))
    tasks = [(config, index, seed, tuple(evaluations), trailing_window, trace_dir)
             for index, seed in enumerate(replicate_seeds(base_seed, m_reps))]
    if workers > 1 and m_reps > 1:
        with Pool(min(workers, m_reps)) as pool:
            outcomes = pool.map(_run_replicate, tasks)
    else:
        outcomes = [_run_replicate(task) for task in tasks]
    return sorted(outcomes, key=lambda outcome: outcome.index)


def run_replicates(config: RunConfig, m_reps: int, base_seed: int,
                   evaluations: Optional[Sequence[EvaluationSpec]] = None,
                   workers: int = 1, trailing_window: Optional[int] = None,
                   axis: str = "replicates", value: float = 0.0, label: str = "",
                   trace_dir: Optional[str] = None) -> SweepCell:
    """Executes ``m_reps`` seeded replicates of ``config`` and aggregates them into one cell.

    Without explicit ``evaluations`` the config's own scoring and benchmark
    are used under the name ``configured``. With ``trace_dir`` every replicate
    trace is written there as ``replicate_<index>.jsonl``.
    """
    evaluations = list(evaluations) if evaluations else [configured_evaluation(config)]
    logger.debug(f"Running {m_reps} replicates of {config.model_tag} (N={config.n_rounds}, workers={workers})")
    outcomes = collect_outcomes(config, m_reps, base_seed, evaluations, workers, trailing_window, trace_dir)
    conditional = [outcome.s_cond for outcome in outcomes if outcome.s_cond is not None]
    cell = SweepCell(
        axis=axis,
        value=value,
        label=label or config.model_tag,
        n_rounds=config.n_rounds,
        m_reps=m_reps,
        base_seed=base_seed,
        mean_s_uncond=float(np.mean([outcome.s_uncond for outcome in outcomes])),
        mean_s_cond=float(np.mean(conditional)) if conditional else None,
        mean_trailing=float(np.mean([outcome.trailing for outcome in outcomes])),
        evaluations=aggregate(outcomes, evaluations),
    )
    return cell
