"""Round structure, success event and the two scoring rules of the 2->1 random access code.

A round draws two preparation bits ``(a0, a1)`` and a query ``y``; the encoder
sends one message bit ``m`` and the decoder outputs ``b``. The round succeeds
when ``b`` equals the queried bit ``a_y``. Selection may later mark rounds as
discarded (``kept = 0``).

Traces are stored column-wise in read-only numpy arrays; ``Trace.rounds``
materialises ``RoundRecord`` objects on demand.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.core.base.errors import DomainError

Bit = int

MAX_ROUNDS = 2**31 - 1
TRACE_COLUMNS = ("t", "a0", "a1", "y", "m", "b", "x", "kept")


class ScoringMode(str, Enum):
    UNCONDITIONAL = "UNCONDITIONAL"
    CONDITIONAL = "CONDITIONAL"


def check_bit(value, name: str = "bit") -> Bit:
    """Returns ``value`` as an int, raising DomainError unless it is 0 or 1."""
    if isinstance(value, bool):
        value = int(value)
    if value not in (0, 1):
        raise DomainError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


def success(a0: Bit, a1: Bit, y: Bit, b: Bit) -> int:
    """Success indicator: 1 iff ``b`` equals the bit selected by the query ``y``."""
    queried = a1 if y else a0
    return int(b == queried)


@dataclass(frozen=True)
class RoundRecord:
    t: int
    a0: Bit
    a1: Bit
    y: Bit
    m: Bit
    b: Bit
    x: int
    kept: int = 1

    def __post_init__(self):
        if self.t < 1:
            raise DomainError(f"round index must be >= 1, got {self.t}")
        for name in ("a0", "a1", "y", "m", "b", "x", "kept"):
            check_bit(getattr(self, name), name)
        if self.x != success(self.a0, self.a1, self.y, self.b):
            raise DomainError(f"round {self.t}: x={self.x} disagrees with b == a_y")


def _frozen(values, n: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int8).reshape(-1)
    if arr.shape[0] != n:
        raise DomainError(f"column {name} has {arr.shape[0]} entries, expected {n}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise DomainError(f"column {name} contains non-bit values")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trace:
    """An immutable sequence of rounds with indices 1..N.

    Attributes:
        a0, a1, y, m, b, x, kept: int8 columns of length N.
        seed: RNG seed the trace was generated with (None for ingested logs).
        model_tag: Identifier of the generating configuration.
        selected: True once a selection rule has been applied.
    """

    a0: np.ndarray
    a1: np.ndarray
    y: np.ndarray
    m: np.ndarray
    b: np.ndarray
    x: np.ndarray
    kept: np.ndarray
    seed: Optional[int] = None
    model_tag: str = ""
    selected: bool = False

    def __post_init__(self):
        n = int(np.asarray(self.x).reshape(-1).shape[0])
        if n > MAX_ROUNDS:
            raise DomainError(f"trace length {n} exceeds {MAX_ROUNDS}")
        for name in ("a0", "a1", "y", "m", "b", "x", "kept"):
            object.__setattr__(self, name, _frozen(getattr(self, name), n, name))
        expected = np.where(self.y == 0, self.a0, self.a1) == self.b
        if not np.array_equal(expected.astype(np.int8), self.x):
            bad = int(np.flatnonzero(expected.astype(np.int8) != self.x)[0]) + 1
            raise DomainError(f"round {bad}: x disagrees with b == a_y")

    @classmethod
    def from_columns(cls, a0, a1, y, m, b, kept=None, seed: Optional[int] = None,
                     model_tag: str = "") -> "Trace":
        """Builds a trace from input/message/output columns, computing the success column."""
        a0 = np.asarray(a0, dtype=np.int8)
        a1 = np.asarray(a1, dtype=np.int8)
        y = np.asarray(y, dtype=np.int8)
        b = np.asarray(b, dtype=np.int8)
        x = (np.where(y == 0, a0, a1) == b).astype(np.int8)
        if kept is None:
            kept = np.ones_like(x)
        return cls(a0=a0, a1=a1, y=y, m=m, b=b, x=x, kept=kept, seed=seed, model_tag=model_tag)

    @classmethod
    def from_records(cls, records: Iterable[RoundRecord], seed: Optional[int] = None,
                     model_tag: str = "", selected: Optional[bool] = None) -> "Trace":
        """Builds a trace from round records whose indices run 1..N without gaps."""
        records = list(records)
        for expected_t, record in enumerate(records, start=1):
            if record.t != expected_t:
                raise DomainError(f"round indices must be contiguous from 1: expected {expected_t}, got {record.t}")
        columns = {name: [getattr(r, name) for r in records] for name in TRACE_COLUMNS[1:]}
        kept = np.asarray(columns["kept"], dtype=np.int8)
        if selected is None:
            selected = bool(kept.size and kept.min() == 0)
        return cls(**columns, seed=seed, model_tag=model_tag, selected=selected)

    def __len__(self) -> int:
        return int(self.x.shape[0])

    @property
    def n_kept(self) -> int:
        return int(self.kept.sum())

    @property
    def rounds(self) -> Tuple[RoundRecord, ...]:
        return tuple(
            RoundRecord(t, int(a0), int(a1), int(y), int(m), int(b), int(x), int(k))
            for t, (a0, a1, y, m, b, x, k) in enumerate(
                zip(self.a0, self.a1, self.y, self.m, self.b, self.x, self.kept), start=1
            )
        )

    def with_kept(self, kept: Sequence[int]) -> "Trace":
        """Returns a copy carrying the given selection flags, marked as selected."""
        return Trace(a0=self.a0, a1=self.a1, y=self.y, m=self.m, b=self.b, x=self.x,
                     kept=kept, seed=self.seed, model_tag=self.model_tag, selected=True)

    def query_counts(self) -> Tuple[int, int]:
        """Returns ``(n0, n)``: the number of rounds with y=0 and the total round count."""
        return int(len(self) - int(self.y.sum())), len(self)


def score_unconditional(trace: Trace) -> float:
    """Successes on kept rounds divided by all attempted rounds; discarded rounds count as failures."""
    n = len(trace)
    if n == 0:
        raise DomainError("no rounds")
    kept_successes = int(np.dot(trace.kept.astype(np.int64), trace.x.astype(np.int64)))
    return kept_successes / n


def score_conditional(trace: Trace) -> float:
    """Success rate over kept rounds only."""
    n_kept = trace.n_kept
    if n_kept == 0:
        raise DomainError("conditional score undefined: no kept rounds")
    kept_successes = int(np.dot(trace.kept.astype(np.int64), trace.x.astype(np.int64)))
    return kept_successes / n_kept


def score(trace: Trace, mode: ScoringMode) -> float:
    """Dispatches to the scoring rule named by ``mode``."""
    if ScoringMode(mode) is ScoringMode.CONDITIONAL:
        return score_conditional(trace)
    return score_unconditional(trace)
