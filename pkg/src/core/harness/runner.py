"""Single simulation runs: inputs, encoding, fixed decoding, selection, certification."""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.core.certify.certifier import certify, evaluation_preset
from src.core.logging.setup import get_logger
from src.core.rac.inputs import generate_inputs
from src.core.rac.rng import spawn_streams
from src.core.rac.selection import apply_selection
from src.core.rac.strategies import BanditState, initial_state, play_block
from src.core.rac.trial import Trace
from src.core.schemas.report import ScoreReport
from src.core.schemas.run_config import BenchmarkKind, RunConfig
from src.core.schemas.sweep import EvaluationSpec

logger = get_logger(__name__)


@dataclass
class Simulation:
    """Result of one simulated run.

    Attributes:
        trace: The selected trace.
        schedule: Per-round conditional bias the queries were drawn with.
        strategy_state: Final encoder state (learned action values for bandits).
    """
    trace: Trace
    schedule: np.ndarray
    strategy_state: BanditState


def simulate(config: RunConfig) -> Simulation:
    """Simulates ``config.n_rounds`` rounds and applies the selection rule."""
    streams = spawn_streams(config.seed)
    block = generate_inputs(config.input_model, config.n_rounds, streams.inputs)
    state = initial_state(config.strategy)
    encoded = play_block(config.strategy, state, block.a0, block.a1, block.y,
                         streams.strategy, streams.device)
    trace = Trace.from_columns(block.a0, block.a1, block.y, encoded.m, encoded.b,
                               seed=config.seed, model_tag=config.model_tag)
    trace = apply_selection(trace, config.selection, streams.selection)
    return Simulation(trace=trace, schedule=block.eps, strategy_state=state)


def evaluate(simulation: Simulation, evaluation: EvaluationSpec, config: RunConfig) -> ScoreReport:
    """Certifies a simulated trace under one evaluation, supplying the bias schedule when needed."""
    schedule: Optional[np.ndarray] = None
    if evaluation.benchmark.mode is BenchmarkKind.NONSTATIONARY and evaluation.benchmark.schedule is None:
        schedule = simulation.schedule
    return certify(simulation.trace, evaluation.scoring, evaluation.benchmark, config.confidence,
                   schedule=schedule)


def configured_evaluation(config: RunConfig, name: str = "configured") -> EvaluationSpec:
    return EvaluationSpec(name=name, scoring=config.scoring, benchmark=config.benchmark)


def run_once(config: RunConfig) -> Tuple[Trace, ScoreReport]:
    """Simulates and certifies one run under the config's own scoring and benchmark."""
    simulation = simulate(config)
    report = evaluate(simulation, configured_evaluation(config), config)
    logger.info(f"{config.model_tag} N={config.n_rounds} seed={config.seed}: "
                f"score={report.score:.6f} s_low={report.s_low:.6f} "
                f"benchmark={report.benchmark_value:.6f} {report.verdict.value}")
    return simulation.trace, report


def preset_evaluation(name: str, config: RunConfig) -> EvaluationSpec:
    """EvaluationSpec of a named preset (ALIGNED or CARELESS) for the config's input model."""
    scoring, benchmark = evaluation_preset(name, config.input_model)
    return EvaluationSpec(name=name.lower(), scoring=scoring, benchmark=benchmark)
