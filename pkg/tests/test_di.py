import os

import pytest

from src.core.config.manager import ConfigManager
from src.core.di.container import ServiceContainer
from src.core.di.setup import setup_container
from src.core.schemas.validator import SchemaValidator
from src.tools.rac_lab import RacLabAssistant


def test_setup_registers_services(output_dir):
    container = setup_container(output_dir=output_dir)
    assert isinstance(container.get("config_manager"), ConfigManager)
    assert isinstance(container.get("schema_validator"), SchemaValidator)
    assistant = container.get("rac_lab")
    assert isinstance(assistant, RacLabAssistant)
    assert assistant.output_path("report.json") == os.path.join(output_dir, "report.json")


def test_unregistered_service():
    with pytest.raises(ValueError, match="not registered"):
        ServiceContainer.get("plotter")


def test_output_directory_falls_back_to_settings():
    assistant = RacLabAssistant()
    assert assistant.output_dir == ConfigManager.get_instance().output_directory()
