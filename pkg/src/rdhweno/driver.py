"""Pseudo-time iteration to a steady state.

The loop is the same in 1D and 2D: compute ``dt`` from the current wave
speeds, take one forward-Euler step (which also reports the residue of the
state it started from), and stop on convergence, stagnation, the iteration
cap or a non-finite state.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from rdhweno import rd1d, rd2d, stencils
from rdhweno.models import UnphysicalStateError
from rdhweno.problems import PRECISIONS, ProblemSpec, Setup, get_problem

log = logging.getLogger(__name__)

CONVERGED = "converged"
STAGNATED = "stagnated"
MAX_ITERS = "max_iters"
DIVERGED = "diverged"

HISTORY_LIMIT = 100_000


@dataclass
class RunConfig:
    """One solver run.  ``None`` fields take the problem's defaults."""

    problem: str
    n: int | None = None
    m: int | None = None
    cfl: float | None = None
    sigma: float | None = None
    delta: float | None = None
    epsilon: float = stencils.DEFAULT_EPSILON
    max_iters: int = 1_000_000
    residue_tol: float | None = None
    stagnation_window: int | None = None
    improvement: float = 1e-3
    precision: str | None = None
    params: dict = field(default_factory=dict)
    out: str | None = None

    def validate(self) -> None:
        spec = get_problem(self.problem)
        n = self.n if self.n is not None else spec.default_n
        if n < 8 or (self.m is not None and self.m < 8):
            raise ValueError("grids need at least 8 cells per direction")
        if self.m is not None and spec.dimension == 1:
            raise ValueError(f"{spec.id} is one-dimensional; --m does not apply")
        for name in ("cfl", "residue_tol"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.delta is not None and not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.sigma is not None and self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 0 or (self.stagnation_window is not None
                                  and self.stagnation_window < 1):
            raise ValueError("max_iters must be >= 0 and stagnation_window >= 1")
        if self.precision is not None and self.precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {sorted(PRECISIONS)}")

    def resolved(self) -> RunConfig:
        """Copy with every problem default filled in."""
        self.validate()
        spec = get_problem(self.problem)
        n = self.n if self.n is not None else spec.default_n
        m = None
        if spec.dimension == 2:
            m = self.m if self.m is not None else spec.default_m(n)
        pick = lambda mine, theirs: theirs if mine is None else mine  # noqa: E731
        return RunConfig(
            problem=spec.id, n=n, m=m,
            cfl=pick(self.cfl, spec.cfl),
            sigma=pick(self.sigma, spec.sigma),
            delta=pick(self.delta, spec.delta),
            epsilon=self.epsilon,
            max_iters=self.max_iters,
            residue_tol=pick(self.residue_tol, spec.residue_tol),
            stagnation_window=pick(self.stagnation_window, spec.stagnation_window),
            improvement=self.improvement,
            precision=pick(self.precision, spec.precision),
            params={**spec.params, **self.params},
            out=self.out,
        )


class ResidueHistory:
    """Residue per iteration, thinned to every k-th entry past a size limit."""

    def __init__(self, limit: int = HISTORY_LIMIT):
        self.limit = limit
        self.stride = 1
        self.entries: list[tuple[int, float]] = []
        self._last: tuple[int, float] | None = None

    def append(self, it: int, residue: float) -> None:
        self._last = (it, residue)
        if it % self.stride:
            return
        self.entries.append((it, residue))
        if len(self.entries) > self.limit:
            self.stride *= 2
            self.entries = [e for e in self.entries if e[0] % self.stride == 0]

    def finish(self) -> list[tuple[int, float]]:
        if self._last is not None and (not self.entries or self.entries[-1] != self._last):
            self.entries.append(self._last)
        return self.entries


@dataclass
class RunReport:
    config: RunConfig
    iterations: int
    residue_history: list[tuple[int, float]]
    solution: Any
    wall_time: float
    termination: str
    message: str = ""
    setup: Setup | None = None

    @property
    def initial_residue(self) -> float:
        return self.residue_history[0][1]

    @property
    def final_residue(self) -> float:
        return self.residue_history[-1][1]

    @property
    def min_residue(self) -> float:
        return min(r for _, r in self.residue_history)

    @property
    def diverged(self) -> bool:
        return self.termination == DIVERGED


def compute_dt(sol, model, cfl: float) -> float:
    if isinstance(sol, rd2d.NodalSolution2D):
        return rd2d.compute_dt_2d(sol, model, cfl)
    return rd1d.compute_dt_1d(sol, model, cfl)


def _stepper(sol, model, cfg: RunConfig) -> Callable:
    if isinstance(sol, rd2d.NodalSolution2D):
        return lambda s, dt: rd2d.advance_2d(s, model, dt, cfg.delta, cfg.sigma, cfg.epsilon)
    return lambda s, dt: rd1d.advance_1d(s, model, dt, cfg.delta, cfg.epsilon)


def iterate(sol, model, cfg: RunConfig):
    """Run the pseudo-time loop on an existing solution.

    ``cfg`` must be resolved.  Returns ``(solution, iterations, history,
    termination, message)``; the solution returned is the last state whose
    residue was measured.
    """
    step = _stepper(sol, model, cfg)
    history = ResidueHistory()
    threshold = None
    best = math.inf
    since = 0
    it = 0
    while True:
        try:
            dt = compute_dt(sol, model, cfg.cfl)
            new, residue = step(sol, dt)
        except (rd1d.DivergenceError, UnphysicalStateError, FloatingPointError) as exc:
            return sol, it, history.finish(), DIVERGED, f"iteration {it}: {exc}"
        if not math.isfinite(residue):
            history.append(it, residue)
            return sol, it, history.finish(), DIVERGED, f"iteration {it}: non-finite residue"
        history.append(it, residue)
        if threshold is None:
            threshold = cfg.residue_tol * (1.0 + residue)
        if residue < threshold:
            return sol, it, history.finish(), CONVERGED, ""
        if residue < best * (1.0 - cfg.improvement):
            best, since = residue, 0
        else:
            since += 1
        if since >= cfg.stagnation_window:
            msg = f"no improvement over {cfg.stagnation_window} iterations"
            return sol, it, history.finish(), STAGNATED, msg
        if it >= cfg.max_iters:
            return sol, it, history.finish(), MAX_ITERS, ""
        sol = new
        it += 1


def prepare(cfg: RunConfig, spec: ProblemSpec | None = None):
    """Resolve ``cfg`` and build ``(cfg, spec, setup, solution)``."""
    cfg = cfg.resolved()
    spec = spec or get_problem(cfg.problem)
    setup = spec.setup(cfg.params)
    sol = spec.solution(setup, cfg.n, cfg.m, cfg.precision)
    return cfg, spec, setup, sol


def run_to_steady(cfg: RunConfig) -> RunReport:
    """Iterate the configured problem to a steady state."""
    cfg, spec, setup, sol = prepare(cfg)
    log.info("running %s on %s grid", spec.id, cfg.n if cfg.m is None else f"{cfg.n}x{cfg.m}")
    start = time.perf_counter()
    with np.errstate(over="ignore", invalid="ignore"):
        sol, iters, history, reason, msg = iterate(sol, setup.model, cfg)
    wall = time.perf_counter() - start
    log.info("%s after %d iterations (residue %.3e)", reason, iters, history[-1][1])
    return RunReport(cfg, iters, history, sol, wall, reason, msg, setup)
