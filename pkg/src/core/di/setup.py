from src.core.di.container import ServiceContainer
from src.core.config.manager import ConfigManager
from src.core.schemas.validator import SchemaValidator
from src.core.logging.setup import get_logger

logger = get_logger(__name__)


def register_core_services():
    """Register core services in the container."""
    logger.debug("Registering core services...")

    config_manager = ConfigManager.get_instance()
    ServiceContainer.register("config_manager", config_manager)

    schema_validator = SchemaValidator()
    ServiceContainer.register("schema_validator", schema_validator)


def register_tool_services(output_dir=None):
    """Register tool services in the container.

    Args:
        output_dir: Output directory handed to the tools; None uses the configured default.
    """
    # Imported here to avoid circular imports
    from src.tools.rac_lab.assistant import RacLabAssistant
    ServiceContainer.register("rac_lab", RacLabAssistant(output_dir=output_dir))
    logger.debug("Registered RacLabAssistant")


def setup_container(output_dir=None):
    """Set up the service container with all required services and return it."""
    register_core_services()
    register_tool_services(output_dir)
    return ServiceContainer
