from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict

SchemaT = TypeVar("SchemaT", bound="BaseSchema")


class BaseSchema(BaseModel):
    """Base class for all schemas. Unknown keys are rejected so typos in a config fail loudly."""

    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)

    def evolve(self: SchemaT, **changes: Any) -> SchemaT:
        """Validated copy with ``changes`` applied."""
        data = self.model_dump()
        data.update(changes)
        return type(self).model_validate(data)
