from typing import Any, Dict, List, Optional, Type, TypeVar

from jsonschema import Draft7Validator
from pydantic import BaseModel, ValidationError

from src.core.base.errors import ConfigValidationError
from src.core.logging.setup import get_logger

logger = get_logger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

_BIT = {"type": "integer", "enum": [0, 1]}

TRACE_HEADER_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "format_version": {"type": "integer", "const": 1},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "model_tag": {"type": "string"},
    },
    "required": ["format_version"],
    "additionalProperties": False,
}

TRACE_RECORD_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "t": {"type": "integer", "minimum": 1},
        "a0": _BIT,
        "a1": _BIT,
        "y": _BIT,
        "m": _BIT,
        "b": _BIT,
        "x": _BIT,
        "kept": _BIT,
    },
    "required": ["t", "a0", "a1", "y", "m", "b", "x", "kept"],
    "additionalProperties": False,
}

PAM_TASK_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "n_a": {"type": "integer", "minimum": 1},
        "n_y": {"type": "integer", "minimum": 1},
        "n_b": {"type": "integer", "minimum": 1},
        "n_m": {"type": "integer", "minimum": 1},
        "coeffs": {"type": "array", "items": {"type": "number"}},
        "input_law": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "name": {"type": "string"},
    },
    "required": ["n_a", "n_y", "n_b", "n_m", "coeffs", "input_law"],
    "additionalProperties": False,
}


def _location(path) -> str:
    return ".".join(str(part) for part in path) or "<root>"


class SchemaValidator:
    """Validates ingested documents, turning every failure into field-level diagnostics."""

    def validate_with_pydantic(self, data: Any, model_class: Type[ModelT], source: Optional[str] = None) -> ModelT:
        """Validate data using a Pydantic model.

        Raises:
            ConfigValidationError: With one ``field.path: message`` entry per error.
        """
        if not isinstance(data, dict):
            raise ConfigValidationError([f"<root>: expected a mapping, got {type(data).__name__}"], source)
        try:
            validated = model_class.model_validate(data)
        except ValidationError as e:
            diagnostics = [f"{_location(err['loc'])}: {err['msg']}" for err in e.errors()]
            logger.error(f"{model_class.__name__} validation failed with {len(diagnostics)} error(s)")
            raise ConfigValidationError(diagnostics, source) from None
        logger.debug(f"Successfully validated data with {model_class.__name__}")
        return validated

    def validate_with_jsonschema(self, data: Any, schema: Dict[str, Any]) -> List[str]:
        """Validate data using JSON Schema.

        Returns:
            Diagnostics in document order; empty when the data is valid.
        """
        validator = Draft7Validator(schema)
        errors = sorted(validator.iter_errors(data), key=lambda err: list(err.absolute_path))
        return [f"{_location(err.absolute_path)}: {err.message}" for err in errors]

    def check_record(self, data: Any, schema: Dict[str, Any], where: str,
                     source: Optional[str] = None) -> None:
        """Raises ConfigValidationError for a record that fails ``schema``; ``where`` prefixes each diagnostic."""
        diagnostics = self.validate_with_jsonschema(data, schema)
        if diagnostics:
            raise ConfigValidationError([f"{where}: {message}" for message in diagnostics], source)
