from typing import List, Tuple

import numpy as np
from pydantic import Field, model_validator

from src.core.schemas.base import BaseSchema


class PamTask(BaseSchema):
    """Finite prepare-and-measure task with a linear score.

    ``coeffs`` is the table c[a, y, b] flattened in (a, y, b)-major order and
    ``input_law`` the joint law pi(a, y) flattened in (a, y)-major order.
    """
    n_a: int = Field(..., ge=1, description="|A|, preparation alphabet size")
    n_y: int = Field(..., ge=1, description="|Y|, measurement setting alphabet size")
    n_b: int = Field(..., ge=1, description="|B|, outcome alphabet size")
    n_m: int = Field(..., ge=1, description="|M| = d, message bound")
    coeffs: Tuple[float, ...] = Field(..., description="c[a, y, b], (a, y, b)-major")
    input_law: Tuple[float, ...] = Field(..., description="pi(a, y), (a, y)-major")
    name: str = Field("", description="Free-form label")

    @model_validator(mode='after')
    def tables_match_alphabets(self) -> 'PamTask':
        expected_c = self.n_a * self.n_y * self.n_b
        if len(self.coeffs) != expected_c:
            raise ValueError(f'coeffs has {len(self.coeffs)} entries, expected n_a*n_y*n_b = {expected_c}')
        expected_pi = self.n_a * self.n_y
        if len(self.input_law) != expected_pi:
            raise ValueError(f'input_law has {len(self.input_law)} entries, expected n_a*n_y = {expected_pi}')
        if any(p < 0 for p in self.input_law):
            raise ValueError('input_law entries must be non-negative')
        if abs(sum(self.input_law) - 1.0) > 1e-9:
            raise ValueError(f'input_law must sum to 1, got {sum(self.input_law)}')
        if not all(np.isfinite(self.coeffs)):
            raise ValueError('coeffs must be finite')
        return self

    def coeff_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float).reshape(self.n_a, self.n_y, self.n_b)

    def law_array(self) -> np.ndarray:
        return np.asarray(self.input_law, dtype=float).reshape(self.n_a, self.n_y)


class DeterministicStrategy(BaseSchema):
    """Deterministic encoder f: A -> M and decoder g: M x Y -> B.

    ``decoder`` is flattened in (m, y)-major order.
    """
    encoder: Tuple[int, ...]
    decoder: Tuple[int, ...]
    n_y: int = Field(..., ge=1)

    def decode(self, m: int, y: int) -> int:
        return self.decoder[m * self.n_y + y]

    def decoder_table(self) -> List[List[int]]:
        return [list(self.decoder[i:i + self.n_y]) for i in range(0, len(self.decoder), self.n_y)]
