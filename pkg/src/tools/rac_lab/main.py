import argparse
import json
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from src.core.base.errors import CapacityError, ConfigValidationError, DomainError
from src.core.config.loader import get_config
from src.core.config.run_file import load_run_file
from src.core.di.setup import setup_container
from src.core.logging.setup import get_logger, set_level
from src.tools.rac_lab.assistant import render_report
from src.tools.rac_lab.figures import FIGURES

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CAPACITY = 2

REPLICATE_COMMANDS = ("sweep-bias", "sweep-rounds", "stress-postselect", "reproduce")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration file.")
    common.add_argument("--output-dir", help="Directory for result files (default: RAC_LAB_OUTPUT_DIR or settings).")
    common.add_argument("--seed", type=int, help="Run seed (simulate) or replicate base seed (sweeps, reproduce).")
    common.add_argument("--alpha", type=float, help="Significance level of the score bound.")
    common.add_argument("--beta", type=float, help="Significance level of the bias interval.")
    common.add_argument("--reps", type=int, help="Number of Monte Carlo replicates.")
    common.add_argument("--rounds", type=int, help="Number of rounds per run.")
    common.add_argument("--workers", type=int, help="Worker processes for replicate studies.")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="Override a run-config field, e.g. --set input_model.epsilon=0.1 (repeatable).")
    common.add_argument("--plot", action="store_true", help="Also write an SVG plot (sweeps and reproduce).")
    common.add_argument("--log-level", help="Logging level, e.g. DEBUG.")

    parser = argparse.ArgumentParser(
        prog="rac_lab",
        description="Simulate, certify and stress-test 2->1 random access code certification claims.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="Simulate and certify one run; writes trace and report.")

    p_certify = sub.add_parser("certify", parents=[common], help="Certify an external round log (JSONL or CSV).")
    p_certify.add_argument("trace", help="Trace file to ingest.")
    p_certify.add_argument("--preset", choices=["ALIGNED", "CARELESS"], help="Named evaluation preset.")

    p_ceiling = sub.add_parser("ceiling", parents=[common], help="Classical ceilings of a biased RAC or a task file.")
    p_ceiling.add_argument("--eps", type=float, help="Query bias Pr(y=0) - 1/2 (default 0).")
    p_ceiling.add_argument("--task", help="YAML/JSON prepare-and-measure task file.")
    p_ceiling.add_argument("--max-strategies", type=int, help="Enumeration guard.")

    p_bias = sub.add_parser("sweep-bias", parents=[common], help="Sweep the IID query bias.")
    p_bias.add_argument("--eps-grid", type=_float_list,
                        help="Comma-separated bias values (default from settings).")

    p_rounds = sub.add_parser("sweep-rounds", parents=[common], help="Sweep the number of rounds.")
    p_rounds.add_argument("--n-grid", type=_int_list, help="Comma-separated round counts (default from settings).")
    p_rounds.add_argument("--strategies", help="Comma-separated strategy variants to compare.")

    p_stress = sub.add_parser("stress-postselect", parents=[common],
                              help="Adversarial discarding over a grid of discard fractions.")
    p_stress.add_argument("--f-grid", type=_float_list, help="Comma-separated discard fractions (default from settings).")

    p_reproduce = sub.add_parser("reproduce", parents=[common], help="Run a canned experiment family.")
    p_reproduce.add_argument("figure", choices=sorted(FIGURES), help="Figure family to reproduce.")
    return parser


def collect_overrides(args: argparse.Namespace) -> List[str]:
    """``--set`` overrides followed by the dedicated flags, in application order."""
    overrides = list(args.overrides)
    if args.seed is not None:
        key = "replicates.base_seed" if args.command in REPLICATE_COMMANDS else "seed"
        overrides.append(f"{key}={args.seed}")
    if args.rounds is not None and args.command != "reproduce":
        overrides.append(f"n_rounds={args.rounds}")
    if args.alpha is not None:
        overrides.append(f"confidence.alpha={args.alpha}")
    if args.beta is not None:
        overrides.append(f"confidence.beta={args.beta}")
    if args.reps is not None and args.command != "reproduce":
        overrides.append(f"replicates.m_reps={args.reps}")
    if args.workers is not None:
        overrides.append(f"replicates.workers={args.workers}")
    if getattr(args, "preset", None):
        overrides.append(f"preset={args.preset}")
    return overrides


def _run(args: argparse.Namespace) -> int:
    container = setup_container(output_dir=args.output_dir)
    assistant = container.get("rac_lab")
    validator = container.get("schema_validator")

    if args.command == "ceiling":
        result = assistant.ceiling(eps=args.eps, task_path=args.task, max_strategies=args.max_strategies)
        if result["analytic"] is not None:
            print(f"analytic    {result['analytic']:.12g}")
        print(f"enumerated  {result['enumerated']:.12g}")
        print(f"encoder     {result['encoder']}")
        print(f"decoder     {result['decoder']}")
        return EXIT_OK

    run_file = load_run_file(args.config, collect_overrides(args), validator, ingested=args.command == "certify")
    plot = args.plot or bool(get_config("rac_lab.plot", False))

    if args.command == "simulate":
        outcome = assistant.simulate(run_file)
        print(render_report(outcome["report"]))
    elif args.command == "certify":
        outcome = assistant.certify(args.trace, run_file)
        print(render_report(outcome["report"]))
    elif args.command == "sweep-bias":
        grid = args.eps_grid or get_config("rac_lab.figures.fig2.eps_grid", [0.0, 0.05, 0.1, 0.15, 0.2])
        print(json.dumps(assistant.sweep_bias(run_file, grid, plot=plot), indent=2))
    elif args.command == "sweep-rounds":
        grid = args.n_grid or get_config("rac_lab.figures.fig5.n_grid", [1000, 2000, 5000, 10000, 20000])
        strategies = [name for name in (args.strategies or "").split(",") if name.strip()]
        print(json.dumps(assistant.sweep_rounds(run_file, grid, strategies, plot=plot), indent=2))
    elif args.command == "stress-postselect":
        grid = args.f_grid or get_config("rac_lab.stress_postselect_grid", [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3])
        print(json.dumps(assistant.stress_postselect(run_file, grid, plot=plot), indent=2))
    elif args.command == "reproduce":
        paths = assistant.reproduce(args.figure, run_file, m_reps=args.reps, n_rounds=args.rounds, plot=plot)
        print(json.dumps(paths, indent=2))
    return EXIT_OK


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parses ``argv``, runs the subcommand and returns the exit status (0 ok, 1 invalid input, 2 capacity)."""
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    try:
        return _run(args)
    except CapacityError as e:
        logger.error(f"Enumeration guard exceeded: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConfigValidationError as e:
        logger.error(f"Validation failed{' in ' + e.source if e.source else ''}")
        for diagnostic in e.diagnostics:
            print(f"error: {diagnostic}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        logger.error("Validation failed")
        for err in e.errors():
            location = ".".join(str(part) for part in err["loc"]) or "<root>"
            print(f"error: {location}: {err['msg']}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, FileNotFoundError, IsADirectoryError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        logger.exception(f"A critical error occurred during {args.command}: {e}")
        return EXIT_INVALID


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
