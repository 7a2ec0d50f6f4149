from typing import Any, Dict, Optional, Sequence

from src.core.base.errors import ConfigValidationError, DomainError
from src.core.base.assistant import BaseAssistant
from src.core.ceilings.analytic import NOMINAL_CEILING, rac_effective_ceiling
from src.core.ceilings.enumeration import pam_ceiling_enumerate, rac_task, strategy_count
from src.core.certify.certifier import certify
from src.core.config.run_file import RunFile
from src.core.file_io.utils import read_yaml, write_csv, write_json
from src.core.harness.runner import configured_evaluation, evaluate, simulate
from src.core.harness.sweeps import stress_postselect, sweep_bias, sweep_rounds
from src.core.rac.trace_io import read_trace, write_trace_jsonl
from src.core.schemas.pam_task import PamTask
from src.core.schemas.report import ScoreReport
from src.core.schemas.run_config import StrategySpec, StrategyVariant
from src.core.schemas.sweep import SweepResult
from src.core.schemas.validator import PAM_TASK_SCHEMA
from src.tools.rac_lab.figures import get_figure, run_figure
from src.tools.rac_lab.plots import plot_sweep

REPORT_ROWS = (
    ("model_tag", "model"),
    ("evaluation_tag", "evaluation"),
    ("scoring", "scoring"),
    ("n", "rounds"),
    ("n_kept", "kept rounds"),
    ("s_uncond", "unconditional score"),
    ("s_cond", "conditional score"),
    ("s_low", "lower bound"),
    ("alpha", "alpha"),
    ("bias_eps_hat", "bias estimate"),
    ("bias_eps_max", "bias bound"),
    ("benchmark_mode", "benchmark"),
    ("benchmark_value", "benchmark value"),
    ("delta_rob", "robustness gap"),
    ("delta_rob_minimax", "minimax gap"),
    ("verdict", "verdict"),
)


def render_report(report: ScoreReport) -> str:
    """Aligned two-column text table of a report."""
    flat = report.to_flat_dict()
    width = max(len(label) for _, label in REPORT_ROWS)
    lines = []
    for key, label in REPORT_ROWS:
        value = flat.get(key)
        if value is None:
            continue
        if isinstance(value, float):
            value = f"{value:.6f}"
        lines.append(f"{label.ljust(width)}  {value}")
    return "\n".join(lines)


class RacLabAssistant(BaseAssistant):
    """Runs simulations, certifications, ceiling queries and sweeps, and writes their result files."""

    def __init__(self, output_dir: Optional[str] = None):
        super().__init__("rac_lab", output_dir=output_dir)
        self.persist_traces = bool(self._config_manager.get("harness.persist_traces", False))

    # --- result files ---

    def _write_sweep(self, name: str, result: SweepResult, columns: Optional[Sequence[str]] = None) -> Dict[str, str]:
        ordered = list(columns or [])
        ordered += [column for column in result.columns() if column not in ordered]
        paths = {"csv": self.output_path(f"{name}.csv"), "json": self.output_path(f"{name}.json")}
        write_csv(paths["csv"], ordered, result.to_rows())
        write_json(paths["json"], result.model_dump(mode="json"))
        self.log_info(f"Wrote {len(result.cells)} cells to {paths['csv']}")
        return paths

    def _trace_dir(self, name: str) -> Optional[str]:
        if not self.persist_traces:
            return None
        path = self.output_path(f"{name}_traces")
        self.log_debug(f"Persisting replicate traces under {path}")
        return path

    # --- subcommands ---

    def simulate(self, run_file: RunFile) -> Dict[str, Any]:
        """Simulates and certifies one run; writes ``trace.jsonl`` and ``report.json``."""
        config = run_file.config
        simulation = simulate(config)
        report = evaluate(simulation, configured_evaluation(config), config)
        result = report.to_flat_dict()
        state = simulation.strategy_state
        result["q_table"] = state.q_table() if config.strategy.is_adaptive else None
        trace_path = self.output_path("trace.jsonl")
        report_path = self.output_path("report.json")
        write_trace_jsonl(trace_path, simulation.trace)
        write_json(report_path, result)
        self.log_info(f"{config.model_tag}: {report.verdict.value} (s_low={report.s_low:.6f}, "
                      f"benchmark={report.benchmark_value:.6f})")
        return {"report": report, "trace": trace_path, "json": report_path}

    def certify(self, trace_path: str, run_file: RunFile) -> Dict[str, Any]:
        """Certifies an ingested trace under the run file's scoring, benchmark and confidence levels."""
        trace = read_trace(trace_path, self.validator)
        config = run_file.config
        self.log_debug(f"{trace_path}: {len(trace)} rounds, {config.scoring.value} scoring "
                       f"against {config.benchmark.mode.value}")
        report = certify(trace, config.scoring, config.benchmark, config.confidence)
        report_path = self.output_path("certify_report.json")
        write_json(report_path, report.to_flat_dict())
        self.log_info(f"{trace_path}: {report.verdict.value} ({report.evaluation_tag.value})")
        if run_file.preset and report.evaluation_tag.value != run_file.preset:
            self.log_warning(f"{trace_path}: requested {run_file.preset} evaluation "
                             f"reported as {report.evaluation_tag.value}")
        return {"report": report, "json": report_path}

    def load_task(self, task_path: str) -> PamTask:
        data = read_yaml(task_path)
        try:
            self.validator.check_record(data, PAM_TASK_SCHEMA, "task", source=task_path)
            return self.validator.validate_with_pydantic(data, PamTask, source=task_path)
        except ConfigValidationError as e:
            self.log_error(f"Task file {task_path} rejected with {len(e.diagnostics)} problem(s)")
            raise

    def ceiling(self, eps: Optional[float] = None, task_path: Optional[str] = None,
                max_strategies: Optional[int] = None) -> Dict[str, Any]:
        """Analytic and enumerated ceilings for a biased RAC, or the enumerated ceiling of a task file."""
        if task_path:
            if eps is not None:
                raise DomainError("ceiling takes either --eps or --task, not both")
            task = self.load_task(task_path)
            analytic = None
        else:
            eps = 0.0 if eps is None else float(eps)
            task = rac_task(eps)
            analytic = rac_effective_ceiling(eps)
        value, argmax = pam_ceiling_enumerate(task, max_strategies=max_strategies)
        result = {
            "task": task.name,
            "eps": None if task_path else eps,
            "nominal": NOMINAL_CEILING,
            "analytic": analytic,
            "enumerated": value,
            "strategies": strategy_count(task),
            "encoder": list(argmax.encoder),
            "decoder": argmax.decoder_table(),
        }
        write_json(self.output_path("ceiling.json"), result)
        return result

    def sweep_bias(self, run_file: RunFile, eps_grid: Sequence[float], plot: bool = False) -> Dict[str, str]:
        reps = run_file.replicates
        result = sweep_bias(eps_grid, run_file.config, reps.m_reps, reps.base_seed, workers=reps.workers,
                            trace_dir=self._trace_dir("sweep_bias"))
        paths = self._write_sweep("sweep_bias", result)
        if plot:
            paths["svg"] = plot_sweep(result.to_rows(), "value", [("mean_s_uncond", "mean score")],
                                      self.output_path("sweep_bias.svg"), "Score vs query bias",
                                      "query bias", "score",
                                      references=[("nominal_benchmark", "nominal 3/4"),
                                                  ("effective_benchmark", "effective ceiling")])
        return paths

    def sweep_rounds(self, run_file: RunFile, n_grid: Sequence[int],
                     strategies: Sequence[str] = (), plot: bool = False) -> Dict[str, str]:
        """Round-count sweep of the run file's config, once per requested strategy variant."""
        config = run_file.config
        templates = [config]
        if strategies:
            templates = [config.evolve(strategy=self._strategy_variant(config.strategy, name)) for name in strategies]
        reps = run_file.replicates
        result = sweep_rounds(n_grid, templates, reps.m_reps, reps.base_seed, workers=reps.workers,
                              trace_dir=self._trace_dir("sweep_rounds"))
        paths = self._write_sweep("sweep_rounds", result)
        if plot:
            paths["svg"] = plot_sweep(result.to_rows(), "value",
                                      [("careless_accept_rate", "careless"), ("aligned_accept_rate", "aligned")],
                                      self.output_path("sweep_rounds.svg"), "Acceptance vs rounds",
                                      "rounds N", "acceptance rate", group_by="label", logx=True)
        return paths

    def stress_postselect(self, run_file: RunFile, f_grid: Sequence[float], plot: bool = False) -> Dict[str, str]:
        reps = run_file.replicates
        result = stress_postselect(f_grid, run_file.config, reps.m_reps, reps.base_seed, workers=reps.workers,
                                   trace_dir=self._trace_dir("stress_postselect"))
        paths = self._write_sweep("stress_postselect", result)
        if plot:
            paths["svg"] = plot_sweep(result.to_rows(), "value",
                                      [("mean_s_cond", "conditional"), ("mean_s_uncond", "unconditional")],
                                      self.output_path("stress_postselect.svg"), "Score vs discard fraction",
                                      "discard fraction", "score",
                                      references=[("careless_benchmark", "nominal 3/4"),
                                                  ("aligned_benchmark", "aligned benchmark")])
        return paths

    def reproduce(self, figure: str, run_file: RunFile, m_reps: Optional[int] = None,
                  n_rounds: Optional[int] = None, plot: bool = False) -> Dict[str, str]:
        """Runs a canned figure family and writes its CSV (manifest columns first), JSON and optional SVG."""
        spec = get_figure(figure)
        settings = self.get_config(f"figures.{figure}", {}) or {}
        reps = run_file.replicates
        self.log_info(f"Reproducing {figure}: {spec.description}")
        result = run_figure(figure, settings, m_reps=m_reps, n_rounds=n_rounds, base_seed=reps.base_seed,
                            workers=reps.workers, alpha=run_file.config.confidence.alpha,
                            trace_dir=self._trace_dir(figure))
        paths = self._write_sweep(figure, result, spec.columns)
        if plot:
            paths["svg"] = plot_sweep(result.to_rows(), spec.x, spec.series, self.output_path(f"{figure}.svg"),
                                      spec.description, result.cells[0].axis if result.cells else spec.x,
                                      spec.ylabel, references=spec.references, group_by=spec.group_by,
                                      logx=spec.logx)
        return paths

    @staticmethod
    def _strategy_variant(base: StrategySpec, name: str) -> StrategySpec:
        try:
            variant = StrategyVariant(name.strip().upper())
        except ValueError:
            known = ", ".join(v.value for v in StrategyVariant)
            raise ConfigValidationError([f"strategies: unknown variant '{name}' (known: {known})"]) from None
        return base.evolve(variant=variant)
