from enum import Enum
from typing import Any, Dict, Optional

from pydantic import Field, model_validator

from src.core.rac.trial import ScoringMode
from src.core.schemas.base import BaseSchema
from src.core.schemas.run_config import BenchmarkKind

REPORT_FORMAT_VERSION = 1


class Verdict(str, Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


class EvaluationTag(str, Enum):
    ALIGNED = "ALIGNED"
    CARELESS = "CARELESS"


class BiasEstimate(BaseSchema):
    """Hoeffding interval for the query bias and the derived robust bound."""
    eps_hat: float = Field(..., description="Point estimate n0/n - 1/2")
    delta: float = Field(..., ge=0.0, description="Interval half-width")
    eps_max: float = Field(..., ge=0.0, le=0.5, description="min(|eps_hat| + delta, 1/2)")
    n: int = Field(..., ge=1, description="Sample count")

    @model_validator(mode='after')
    def eps_max_consistent(self) -> 'BiasEstimate':
        expected = min(abs(self.eps_hat) + self.delta, 0.5)
        if abs(expected - self.eps_max) > 1e-12:
            raise ValueError(f'eps_max {self.eps_max} != min(|eps_hat| + delta, 1/2) = {expected}')
        return self


class ScoreReport(BaseSchema):
    """Outcome of certifying one trace: scores, bound, benchmark, gaps and verdict."""
    n: int = Field(..., ge=1)
    n_kept: int = Field(..., ge=0)
    scoring: ScoringMode
    s_uncond: float = Field(..., ge=0.0, le=1.0)
    s_cond: Optional[float] = Field(None, ge=0.0, le=1.0)
    s_low: float = Field(..., ge=0.0, le=1.0)
    alpha: float
    bias: BiasEstimate
    benchmark_mode: BenchmarkKind
    benchmark_value: float
    delta_rob: float
    delta_rob_minimax: Optional[float] = None
    verdict: Verdict
    evaluation_tag: EvaluationTag
    model_tag: str = ""
    seed: Optional[int] = None

    @model_validator(mode='after')
    def gap_and_verdict_consistent(self) -> 'ScoreReport':
        if abs(self.delta_rob - (self.s_low - self.benchmark_value)) > 1e-12:
            raise ValueError('delta_rob must equal s_low - benchmark_value')
        expected = Verdict.ACCEPT if self.s_low > self.benchmark_value else Verdict.REJECT
        if self.verdict is not expected:
            raise ValueError(f'verdict {self.verdict.value} inconsistent with s_low vs benchmark')
        return self

    @property
    def score(self) -> float:
        """The score the verdict was based on."""
        if self.scoring is ScoringMode.CONDITIONAL:
            return self.s_cond
        return self.s_uncond

    def to_flat_dict(self) -> Dict[str, Any]:
        """Flat JSON-ready mapping with ``format_version`` first and bias fields prefixed."""
        data = self.model_dump(mode='json')
        bias = data.pop('bias')
        flat: Dict[str, Any] = {'format_version': REPORT_FORMAT_VERSION}
        flat.update(data)
        for key, value in bias.items():
            flat[f'bias_{key}'] = value
        return flat
