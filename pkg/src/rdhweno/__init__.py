"""Residual distribution HWENO solver for steady hyperbolic balance laws."""

from __future__ import annotations

from rdhweno.driver import RunConfig, RunReport, run_to_steady
from rdhweno.problems import PROBLEMS, get_problem

__all__ = ["PROBLEMS", "RunConfig", "RunReport", "get_problem", "run_to_steady"]
__version__ = "0.1.0"
