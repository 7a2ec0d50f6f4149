from typing import Any, Dict, List, Optional

from pydantic import Field, field_validator, model_validator

from src.core.rac.trial import ScoringMode
from src.core.schemas.base import BaseSchema
from src.core.schemas.run_config import BenchmarkMode


class EvaluationSpec(BaseSchema):
    """A named (scoring rule, benchmark) pair applied to every replicate trace."""
    name: str = Field(..., min_length=1, description="Column prefix in sweep output")
    scoring: ScoringMode
    benchmark: BenchmarkMode

    @field_validator('name')
    @classmethod
    def name_is_identifier(cls, v: str) -> str:
        if not v.replace('_', '').isalnum():
            raise ValueError(f'evaluation name must be alphanumeric/underscore, got {v!r}')
        return v.lower()


class CellStats(BaseSchema):
    """Replicate statistics of one evaluation within a cell."""
    mean_score: float
    mean_s_low: float
    benchmark: float = Field(..., description="Mean benchmark value over replicates")
    mean_delta_rob: float
    median_delta_rob: float
    accept_rate: float = Field(..., ge=0.0, le=1.0)
    accept_se: float = Field(..., ge=0.0)
    m_reps: int = Field(..., ge=1)

    @model_validator(mode='after')
    def se_is_binomial(self) -> 'CellStats':
        expected = (self.accept_rate * (1.0 - self.accept_rate) / self.m_reps) ** 0.5
        if abs(expected - self.accept_se) > 1e-12:
            raise ValueError(f'accept_se {self.accept_se} != sqrt(r(1-r)/M) = {expected}')
        return self


class SweepCell(BaseSchema):
    """One point of a sweep: the axis value, the configuration label and per-evaluation statistics."""
    axis: str
    value: float
    label: str = ""
    n_rounds: int = Field(..., ge=1)
    m_reps: int = Field(..., ge=1)
    base_seed: int = Field(..., ge=0)
    mean_s_uncond: float
    mean_s_cond: Optional[float] = None
    mean_trailing: float
    evaluations: Dict[str, CellStats]

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            'axis': self.axis,
            'value': self.value,
            'label': self.label,
            'n_rounds': self.n_rounds,
            'm_reps': self.m_reps,
            'base_seed': self.base_seed,
            'mean_s_uncond': self.mean_s_uncond,
            'mean_s_cond': self.mean_s_cond,
            'mean_trailing': self.mean_trailing,
        }
        for name, stats in self.evaluations.items():
            for key, value in stats.model_dump().items():
                if key != 'm_reps':
                    row[f'{name}_{key}'] = value
        return row


class SweepResult(BaseSchema):
    """Ordered collection of sweep cells; serialised as CSV (one row per cell) and JSON."""
    name: str
    cells: List[SweepCell] = Field(default_factory=list)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [cell.to_row() for cell in self.cells]

    def columns(self) -> List[str]:
        columns: List[str] = []
        for row in self.to_rows():
            for key in row:
                if key not in columns:
                    columns.append(key)
        return columns

    def cell(self, value: float, label: Optional[str] = None) -> SweepCell:
        """First cell at ``value`` (and ``label`` when given)."""
        for cell in self.cells:
            if abs(cell.value - value) <= 1e-12 and (label is None or cell.label == label):
                return cell
        raise KeyError(f"no cell at {value!r} with label {label!r}")
