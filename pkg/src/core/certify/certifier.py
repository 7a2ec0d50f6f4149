"""Certification triplet: score, lower confidence bound and classical benchmark.

A claim is accepted only if the lower bound of the configured score strictly
exceeds the configured benchmark. The ALIGNED preset pairs unconditional
scoring with the operationally correct ceiling; the CARELESS preset pairs
conditional scoring with the nominal 3/4, the combination that admits false
acceptance under postselection and biased inputs.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.base.errors import DomainError
from src.core.ceilings.analytic import (
    NOMINAL_CEILING,
    nonstationary_ceiling,
    rac_effective_ceiling,
    robust_ceiling,
)
from src.core.logging.setup import get_logger
from src.core.rac.trial import ScoringMode, Trace, score_conditional, score_unconditional
from src.core.schemas.report import BiasEstimate, EvaluationTag, ScoreReport, Verdict
from src.core.schemas.run_config import (
    BenchmarkKind,
    BenchmarkMode,
    ConfidenceParams,
    EpsMaxSource,
    InputModelSpec,
    InputVariant,
)
from src.core.stats.bounds import bias_interval, get_bound

logger = get_logger(__name__)

NOMINAL_TOLERANCE = 1e-12


def evaluation_preset(name: str, input_model: Optional[InputModelSpec] = None) -> Tuple[ScoringMode, BenchmarkMode]:
    """Scoring rule and benchmark of a named evaluation.

    ALIGNED uses EFFECTIVE for IID inputs (or when no input model is given)
    and the schedule-aware NONSTATIONARY ceiling for Markov and drifting
    inputs; the schedule itself is supplied by the simulator.

    Raises:
        DomainError: For names other than ALIGNED and CARELESS.
    """
    try:
        tag = EvaluationTag(str(name).upper())
    except ValueError:
        raise DomainError(f"unknown evaluation preset '{name}' (expected ALIGNED or CARELESS)") from None

    if tag is EvaluationTag.CARELESS:
        return ScoringMode.CONDITIONAL, BenchmarkMode(mode=BenchmarkKind.NOMINAL)
    if input_model is None or input_model.variant is InputVariant.IID_BIAS:
        known_eps = input_model.epsilon if input_model is not None else 0.0
        return ScoringMode.UNCONDITIONAL, BenchmarkMode(mode=BenchmarkKind.EFFECTIVE, known_eps=known_eps)
    return ScoringMode.UNCONDITIONAL, BenchmarkMode(mode=BenchmarkKind.NONSTATIONARY)


def ingested_preset(name: str, input_model: Optional[InputModelSpec] = None) -> Tuple[ScoringMode, BenchmarkMode]:
    """Scoring rule and benchmark of a named evaluation applied to an external round log.

    Nothing is known about the queries of a log unless the run file declares
    an input model, so ALIGNED then falls back to the ROBUST ceiling with
    ``eps_max`` taken from the log's own bias interval.
    """
    scoring, benchmark = evaluation_preset(name, input_model)
    if input_model is None and scoring is ScoringMode.UNCONDITIONAL:
        benchmark = BenchmarkMode(mode=BenchmarkKind.ROBUST, eps_max_source=EpsMaxSource.DATA_DRIVEN)
    return scoring, benchmark


def classify(scoring: ScoringMode, benchmark: BenchmarkMode, bias: Optional[BiasEstimate] = None,
             benchmark_value: Optional[float] = None) -> EvaluationTag:
    """ALIGNED when unconditional scoring meets a bias-aware benchmark, CARELESS otherwise.

    With ``bias`` and ``benchmark_value`` given, a benchmark no higher than the
    nominal 3/4 is CARELESS whenever the bias interval excludes zero: the data
    contradict the unbiased queries that benchmark assumes.
    """
    if scoring is not ScoringMode.UNCONDITIONAL or benchmark.mode is BenchmarkKind.NOMINAL:
        return EvaluationTag.CARELESS
    if bias is not None and benchmark_value is not None:
        if benchmark_value <= NOMINAL_CEILING + NOMINAL_TOLERANCE and abs(bias.eps_hat) > bias.delta:
            return EvaluationTag.CARELESS
    return EvaluationTag.ALIGNED


def resolve_benchmark(benchmark: BenchmarkMode, bias: BiasEstimate,
                      schedule: Optional[Sequence[float]] = None) -> float:
    """Numeric benchmark value for ``benchmark`` given the trace's bias estimate and schedule."""
    mode = benchmark.mode
    if mode is BenchmarkKind.NOMINAL:
        return NOMINAL_CEILING
    if mode is BenchmarkKind.EFFECTIVE:
        return rac_effective_ceiling(benchmark.known_eps)
    if mode is BenchmarkKind.ROBUST:
        if benchmark.eps_max_source is EpsMaxSource.DATA_DRIVEN:
            return robust_ceiling(bias.eps_max)
        return robust_ceiling(benchmark.eps_max)
    if schedule is None:
        schedule = benchmark.schedule
    if schedule is None:
        raise DomainError("NONSTATIONARY benchmark requires a bias schedule")
    return nonstationary_ceiling(schedule)


def certify(trace: Trace, scoring: ScoringMode, benchmark: BenchmarkMode, params: ConfidenceParams,
            schedule: Optional[Sequence[float]] = None) -> ScoreReport:
    """Scores ``trace``, bounds the score and compares the bound with the benchmark.

    The bound uses ``n = N`` for unconditional scoring and ``n = n_kept`` for
    conditional scoring. ``schedule`` overrides ``benchmark.schedule`` for
    NONSTATIONARY benchmarks.

    Raises:
        DomainError: On an empty trace, conditional scoring without kept
            rounds, or benchmark parameters that cannot be resolved.
    """
    scoring = ScoringMode(scoring)
    n = len(trace)
    s_uncond = score_unconditional(trace)
    n_kept = trace.n_kept
    s_cond = score_conditional(trace) if n_kept > 0 else None

    if scoring is ScoringMode.CONDITIONAL:
        if s_cond is None:
            raise DomainError("conditional score undefined: no kept rounds")
        s_hat, n_bound = s_cond, n_kept
    else:
        s_hat, n_bound = s_uncond, n

    s_low = get_bound(params.bound).lower(s_hat, n_bound, params.alpha)
    n0, _ = trace.query_counts()
    bias = bias_interval(n0, n, params.beta)
    if benchmark.mode is BenchmarkKind.ROBUST and benchmark.eps_max_source is EpsMaxSource.DATA_DRIVEN:
        logger.warning("Data-driven eps_max is estimated from the trace being certified")
    if schedule is None and benchmark.mode is BenchmarkKind.NONSTATIONARY:
        schedule = benchmark.schedule
    if schedule is not None:
        schedule = np.asarray(schedule, dtype=float)
        if schedule.shape[0] != n:
            raise DomainError(f"schedule has {schedule.shape[0]} entries for a trace of {n} rounds")

    benchmark_value = resolve_benchmark(benchmark, bias, schedule)
    delta_rob = s_low - benchmark_value
    verdict = Verdict.ACCEPT if s_low > benchmark_value else Verdict.REJECT
    minimax = delta_rob if benchmark.mode is BenchmarkKind.ROBUST else None
    tag = classify(scoring, benchmark, bias, benchmark_value)
    if tag is EvaluationTag.CARELESS and classify(scoring, benchmark) is EvaluationTag.ALIGNED:
        logger.warning(f"Benchmark {benchmark_value:.6f} assumes unbiased queries but the trace has "
                       f"eps_hat={bias.eps_hat:.6f} (+/- {bias.delta:.6f}); reporting CARELESS")

    return ScoreReport(
        n=n,
        n_kept=n_kept,
        scoring=scoring,
        s_uncond=s_uncond,
        s_cond=s_cond,
        s_low=s_low,
        alpha=params.alpha,
        bias=bias,
        benchmark_mode=benchmark.mode,
        benchmark_value=benchmark_value,
        delta_rob=delta_rob,
        delta_rob_minimax=minimax,
        verdict=verdict,
        evaluation_tag=tag,
        model_tag=trace.model_tag,
        seed=trace.seed,
    )
