# src/tools/rac_lab/__init__.py
"""
RAC certification lab

Command-line tool for simulating 2->1 random access code experiments,
certifying round logs against classical ceilings and stress-testing
evaluation rules under biased queries, memory and postselection.
"""

from src.tools.rac_lab.assistant import RacLabAssistant

__all__ = ["RacLabAssistant"]
