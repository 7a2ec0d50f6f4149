# src/core/harness/__init__.py
"""
Simulation harness: single runs, seeded Monte Carlo replicates and sweeps.
"""

from src.core.harness.replicates import run_replicates
from src.core.harness.runner import run_once, simulate
from src.core.harness.sweeps import stress_postselect, sweep_bias, sweep_rounds

__all__ = ["run_once", "simulate", "run_replicates", "sweep_bias", "sweep_rounds", "stress_postselect"]
