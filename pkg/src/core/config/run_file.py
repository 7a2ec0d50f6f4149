"""Run configuration files.

A run file is a YAML mapping whose top-level keys are the ``RunConfig``
fields, plus an optional ``replicates`` section and an optional ``preset``
(ALIGNED or CARELESS) that fills in scoring and benchmark. Overrides of the
form ``section.key=value`` are applied to the parsed mapping before
validation; values are parsed as YAML scalars.
"""
import copy
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import yaml

from src.core.base.errors import ConfigValidationError, DomainError
from src.core.certify.certifier import evaluation_preset, ingested_preset
from src.core.file_io.utils import read_yaml
from src.core.logging.setup import get_logger
from src.core.schemas.run_config import ReplicateSettings, RunConfig
from src.core.schemas.validator import SchemaValidator

logger = get_logger(__name__)


class RunFile(NamedTuple):
    config: RunConfig
    replicates: ReplicateSettings
    preset: Optional[str] = None


def parse_override(text: str):
    """Splits ``section.key=value`` into the key path and the YAML-parsed value."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigValidationError([f"override '{text}': expected key=value"])
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ConfigValidationError([f"override '{text}': {e}"]) from None
    return key.split("."), value


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Returns a copy of ``data`` with every override applied in order."""
    data = copy.deepcopy(data)
    for text in overrides:
        path, value = parse_override(text)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigValidationError([f"override '{text}': {part} is not a section"])
            node = child
        node[path[-1]] = value
    return data


def _prefixed(error: ConfigValidationError, prefix: str) -> ConfigValidationError:
    return ConfigValidationError([f"{prefix}.{message}" for message in error.diagnostics], error.source)


def build_run_file(data: Any, overrides: Sequence[str] = (), source: Optional[str] = None,
                   validator: Optional[SchemaValidator] = None, ingested: bool = False) -> RunFile:
    """Validates a parsed run document (after overrides) into a ``RunFile``.

    With ``ingested`` the preset is resolved for certifying an external log
    (see ``ingested_preset``); the input model only counts when the document
    declares one.

    Raises:
        ConfigValidationError: On unknown keys, invalid values or a bad preset.
    """
    validator = validator or SchemaValidator()
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigValidationError([f"<root>: expected a mapping, got {type(data).__name__}"], source)
    data = apply_overrides(data, overrides)
    replicates_data = data.pop("replicates", None) or {}
    preset = data.pop("preset", None)
    declares_inputs = "input_model" in data

    diagnostics: List[str] = []
    if preset is not None:
        for key in ("scoring", "benchmark"):
            if key in data:
                diagnostics.append(f"{key}: conflicts with preset {preset!r}")
    if diagnostics:
        raise ConfigValidationError(diagnostics, source)

    config = validator.validate_with_pydantic(data, RunConfig, source)
    try:
        replicates = validator.validate_with_pydantic(replicates_data, ReplicateSettings, source)
    except ConfigValidationError as e:
        raise _prefixed(e, "replicates") from None

    if preset is not None:
        try:
            if ingested:
                scoring, benchmark = ingested_preset(str(preset), config.input_model if declares_inputs else None)
            else:
                scoring, benchmark = evaluation_preset(str(preset), config.input_model)
        except DomainError as e:
            raise ConfigValidationError([f"preset: {e}"], source) from None
        config = config.evolve(scoring=scoring, benchmark=benchmark)
        preset = str(preset).upper()

    logger.debug(f"Run config {config.model_tag} (N={config.n_rounds}, seed={config.seed})")
    return RunFile(config=config, replicates=replicates, preset=preset)


def load_run_file(filepath: Optional[str], overrides: Sequence[str] = (),
                  validator: Optional[SchemaValidator] = None, ingested: bool = False) -> RunFile:
    """Reads and validates a run file; ``None`` yields the defaults with overrides applied."""
    if filepath is None:
        return build_run_file({}, overrides, None, validator, ingested)
    try:
        data = read_yaml(filepath)
    except yaml.YAMLError as e:
        raise ConfigValidationError([f"invalid YAML: {e}"], filepath) from None
    return build_run_file(data, overrides, filepath, validator, ingested)
