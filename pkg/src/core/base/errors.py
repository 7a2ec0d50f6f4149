from typing import List, Optional


class DomainError(ValueError):
    """A domain operation was called outside its precondition."""


class CapacityError(DomainError):
    """The strategy enumeration guard was exceeded."""

    def __init__(self, strategy_count: int, limit: int):
        self.strategy_count = strategy_count
        self.limit = limit
        super().__init__(
            f"enumeration guard exceeded: {strategy_count} deterministic strategies (limit {limit})"
        )


class ConfigValidationError(DomainError):
    """A run config, task file or trace file failed validation.

    Attributes:
        diagnostics: One ``location: message`` entry per problem found.
        source: The file the problem was found in, if any.
    """

    def __init__(self, diagnostics: List[str], source: Optional[str] = None):
        self.diagnostics = list(diagnostics)
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(self.diagnostics))
