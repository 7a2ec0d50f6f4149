from typing import Any, Dict


class ServiceContainer:
    """Process-wide service locator for the shared config manager, validator and tools."""

    _instances: Dict[str, Any] = {}

    @classmethod
    def register(cls, service_name: str, instance: Any) -> None:
        """Register (or replace) a service instance."""
        cls._instances[service_name] = instance

    @classmethod
    def get(cls, service_name: str) -> Any:
        """Get a service instance.

        Raises:
            ValueError: If the service is not registered.
        """
        if service_name not in cls._instances:
            raise ValueError(f"Service {service_name} not registered")
        return cls._instances[service_name]

    @classmethod
    def has(cls, service_name: str) -> bool:
        return service_name in cls._instances

    @classmethod
    def reset(cls) -> None:
        """Drop every registration; tests call this between CLI invocations."""
        cls._instances = {}
