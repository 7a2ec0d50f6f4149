from typing import Optional, Sequence

import numpy as np
import pytest

from src.core.di.container import ServiceContainer
from src.core.rac.trial import Trace
from src.core.schemas.run_config import RunConfig, StrategySpec, StrategyVariant


def trace_from_successes(x: Sequence[int], kept: Optional[Sequence[int]] = None,
                         model_tag: str = "test") -> Trace:
    """Trace whose success column equals ``x``: a0 = a1 = 1, y = 0 and b = x."""
    x = np.asarray(x, dtype=np.int8)
    ones = np.ones_like(x)
    zeros = np.zeros_like(x)
    trace = Trace.from_columns(ones, ones, zeros, x, x, model_tag=model_tag)
    if kept is not None:
        trace = trace.with_kept(kept)
    return trace


@pytest.fixture
def make_trace():
    return trace_from_successes


@pytest.fixture
def small_config() -> RunConfig:
    return RunConfig(n_rounds=2000, seed=7, strategy=StrategySpec(variant=StrategyVariant.STATIC_A0))


@pytest.fixture
def output_dir(tmp_path):
    path = tmp_path / "results"
    path.mkdir()
    return str(path)


@pytest.fixture(autouse=True)
def clean_container():
    ServiceContainer.reset()
    yield
    ServiceContainer.reset()
