import os
from typing import Any, Optional

from src.core.config.manager import ConfigManager
from src.core.logging.setup import get_logger
from src.core.schemas.validator import SchemaValidator


class BaseAssistant:
    """Base class for all assistant implementations in the lab.

    This class provides common functionality for all assistants, including:
    - Configuration access
    - Logging
    - Schema validation
    - Output directory resolution
    """

    def __init__(self, tool_name: str, output_dir: Optional[str] = None):
        """Initialize the base assistant.

        Args:
            tool_name: The name of the tool this assistant belongs to.
                      Used for configuration access and logging.
            output_dir: Directory for result files; defaults to the configured output directory.
        """
        self._tool_name = tool_name
        self._config_manager = ConfigManager.get_instance()
        self._logger = get_logger(f"src.tools.{tool_name}")
        self._schema_validator = SchemaValidator()
        self._output_dir = output_dir

    def get_config(self, key: str, default: Any = None) -> Any:
        """Get a tool-specific configuration value.

        Args:
            key: The configuration key (without the tool prefix).
            default: The default value to return if the key is not found.

        Returns:
            The configuration value or the default.
        """
        return self._config_manager.get_tool_config(self._tool_name, key, default)

    @property
    def validator(self) -> SchemaValidator:
        return self._schema_validator

    @property
    def output_dir(self) -> str:
        return self._output_dir or self._config_manager.output_directory()

    def output_path(self, *parts: str) -> str:
        """Path below the output directory."""
        return os.path.join(self.output_dir, *parts)

    def log_info(self, message: str) -> None:
        """Log an info message."""
        self._logger.info(message)

    def log_error(self, message: str) -> None:
        """Log an error message."""
        self._logger.error(message)

    def log_warning(self, message: str) -> None:
        """Log a warning message."""
        self._logger.warning(message)

    def log_debug(self, message: str) -> None:
        """Log a debug message."""
        self._logger.debug(message)
