"""Error norms, convergence studies and CSV output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from rdhweno.driver import DIVERGED, RunConfig, RunReport, run_to_steady
from rdhweno.problems import Section, get_problem
from rdhweno.rd2d import NodalSolution2D

ERRORS_HEADER = ("N", "L1", "L1_order", "L2", "L2_order", "Linf", "Linf_order")


def error_norms(numeric, exact, mask=None) -> tuple[float, float, float]:
    """Mean, root-mean-square and max of ``|numeric - exact|`` over ``mask``."""
    err = np.abs(np.asarray(numeric) - np.asarray(exact))
    if mask is not None:
        err = err[np.asarray(mask, dtype=bool)]
    if err.size == 0:
        raise ValueError("error mask selects no nodes")
    return float(err.mean()), float(np.sqrt((err * err).mean())), float(err.max())


def observed_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    """``log_ratio(e_coarse / e_fine)``; NaN when either error is not positive."""
    if not (e_coarse > 0 and e_fine > 0):
        return math.nan
    return math.log(e_coarse / e_fine) / math.log(ratio)


@dataclass
class ErrorTableRow:
    n: int
    m: int | None
    l1: float
    l2: float
    linf: float
    l1_order: float = math.nan
    l2_order: float = math.nan
    linf_order: float = math.nan
    status: str = "ok"
    iterations: int = 0
    residue: float = math.nan
    wall_time: float = 0.0

    @property
    def label(self) -> str:
        return str(self.n) if self.m is None else f"{self.n}x{self.m}"


# {{{ errors of a run


def node_coordinates(sol):
    if isinstance(sol, NodalSolution2D):
        return sol.mesh()
    return (sol.x,)


def exact_on_nodes(report: RunReport):
    setup = report.setup
    if setup is None or setup.exact is None:
        raise ValueError(f"{report.config.problem} has no exact solution")
    coords = node_coordinates(report.solution)
    u = np.asarray(setup.exact(*coords)[0])
    return u[..., None] if u.ndim == coords[0].ndim else u


def _numeric_nodes(sol) -> np.ndarray:
    return sol.nodes() if isinstance(sol, NodalSolution2D) else sol.nodes


def error_mask(report: RunReport) -> np.ndarray:
    """Updated (non-Dirichlet) nodes, intersected with the problem's region."""
    sol = report.solution
    mask = sol.updated_mask()
    if report.setup is not None and report.setup.mask is not None:
        mask = mask & np.asarray(report.setup.mask(*node_coordinates(sol)), dtype=bool)
    return mask


def run_errors(report: RunReport) -> tuple[float, float, float]:
    comp = report.setup.component if report.setup is not None else 0
    numeric = _numeric_nodes(report.solution)[..., comp]
    exact = exact_on_nodes(report)[..., comp]
    return error_norms(numeric, exact, error_mask(report))


# }}}


# {{{ convergence study


def fill_orders(rows: list[ErrorTableRow]) -> list[ErrorTableRow]:
    for prev, row in zip(rows, rows[1:]):
        ratio = row.n / prev.n
        row.l1_order = observed_order(prev.l1, row.l1, ratio)
        row.l2_order = observed_order(prev.l2, row.l2, ratio)
        row.linf_order = observed_order(prev.linf, row.linf, ratio)
    return rows


def convergence_study(problem: str, grids, base: RunConfig | None = None,
                      out: str | Path | None = None) -> list[ErrorTableRow]:
    """Run ``problem`` on every grid and tabulate errors and observed orders.

    A failed run yields a row with NaN errors and ``status`` set to the
    termination reason.  For 2D problems ``M`` follows the problem's aspect
    ratio unless ``base.m`` is set, in which case it scales with ``N``.
    """
    spec = get_problem(problem)
    if not spec.has_exact:
        raise ValueError(f"{spec.id} has no exact solution to measure errors against")
    base = base or RunConfig(problem=spec.id)
    grids = list(grids)
    rows = []
    for n in grids:
        m = None
        if spec.dimension == 2 and base.m is not None and base.n:
            m = max(int(round(base.m * n / base.n)), 1)
        cfg = replace(base, problem=spec.id, n=n, m=m)
        report = run_to_steady(cfg)
        if report.diverged:
            rows.append(ErrorTableRow(n, report.config.m, math.nan, math.nan, math.nan,
                                      status=DIVERGED, iterations=report.iterations))
        else:
            l1, l2, linf = run_errors(report)
            rows.append(ErrorTableRow(n, report.config.m, l1, l2, linf,
                                      status=report.termination, iterations=report.iterations,
                                      residue=report.final_residue, wall_time=report.wall_time))
        if out is not None:
            emit_outputs(report, Path(out) / f"n{rows[-1].label}")
    fill_orders(rows)
    if out is not None:
        write_errors_csv(rows, Path(out) / "errors.csv")
    return rows


# }}}


# {{{ csv output


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return np.format_float_scientific(value, unique=True)


def write_errors_csv(rows: list[ErrorTableRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ERRORS_HEADER)
        for r in rows:
            writer.writerow([r.label, _fmt(r.l1), _fmt(r.l1_order), _fmt(r.l2),
                             _fmt(r.l2_order), _fmt(r.linf), _fmt(r.linf_order)])
    return path


def _component_names(letter: str, m: int) -> list[str]:
    return [letter] if m == 1 else [f"{letter}{k}" for k in range(m)]


def solution_columns(sol) -> tuple[list[str], np.ndarray]:
    """Header and 2D table of node coordinates and fields."""
    if isinstance(sol, NodalSolution2D):
        X, Y = sol.mesh()
        fields = "uvwz"
        coords = [X.reshape(-1), Y.reshape(-1)]
        names = ["x", "y"]
        values = [sol.nodes(f).reshape(-1, sol.m) for f in fields]
    else:
        fields = "uv"
        coords = [sol.x]
        names = ["x"]
        values = [sol.nodes, sol.node_derivs]
    for f in fields:
        names += _component_names(f, sol.m)
    table = np.column_stack(coords + values)
    return names, table


def write_table(path: Path, header, table) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_solution_csv(sol, path: str | Path) -> Path:
    header, table = solution_columns(sol)
    return write_table(Path(path), header, table)


def read_solution_csv(path: str | Path, dtype=np.float64) -> tuple[list[str], np.ndarray]:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    table = np.array([[dtype(v) for v in row] for row in rows[1:]], dtype=dtype)
    return header, table


def write_residue_csv(history, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "residue"])
        for it, r in history:
            writer.writerow([it, _fmt(r)])
    return path


def cross_section(sol: NodalSolution2D, section: Section):
    """Coordinates along the line and the node states on it.

    Rows and columns use the stored node line nearest the requested value;
    the diagonal takes nodes ``(i, i)`` and reports ``(x + y) / sqrt 2``.
    """
    u = sol.nodes()
    if section.axis == "x":
        j = int(np.argmin(np.abs(sol.y - section.value)))
        return sol.x, u[:, j]
    if section.axis == "y":
        i = int(np.argmin(np.abs(sol.x - section.value)))
        return sol.y, u[i, :]
    if section.axis == "diagonal":
        k = min(sol.nx, sol.ny) + 1
        idx = np.arange(k)
        return (sol.x[idx] + sol.y[idx]) / np.sqrt(2.0), u[idx, idx]
    raise ValueError(f"unknown section axis {section.axis!r}")


def emit_outputs(report: RunReport, directory: str | Path,
                 rows: list[ErrorTableRow] | None = None) -> list[Path]:
    """Write solution, residue history, errors and cross sections."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        written = [write_solution_csv(report.solution, directory / "solution.csv"),
                   write_residue_csv(report.residue_history, directory / "residue.csv")]
        spec = get_problem(report.config.problem)
        if rows is None and spec.has_exact and not report.diverged:
            l1, l2, linf = run_errors(report)
            rows = [ErrorTableRow(report.config.n, report.config.m, l1, l2, linf)]
        if rows:
            written.append(write_errors_csv(rows, directory / "errors.csv"))
        if isinstance(report.solution, NodalSolution2D):
            for section in spec.sections:
                coord, values = cross_section(report.solution, section)
                header = ["s"] + _component_names("u", report.solution.m)
                table = np.column_stack([coord, values])
                written.append(write_table(directory / f"section_{section.name}.csv",
                                           header, table))
    except OSError as exc:
        raise OSError(f"cannot write outputs to {directory}: {exc}") from exc
    return written


# }}}


# {{{ shock location


def steepest_gradient_location(coord, values) -> float:
    """Midpoint of the interval with the largest jump."""
    coord = np.asarray(coord, dtype=float)
    values = np.asarray(values, dtype=float)
    k = int(np.argmax(np.abs(np.diff(values))))
    return 0.5 * (coord[k] + coord[k + 1])


def shock_location(report: RunReport, component: int = 0) -> float:
    sol = report.solution
    if isinstance(sol, NodalSolution2D):
        coord, values = cross_section(sol, Section("diagonal", "diagonal"))
        return steepest_gradient_location(coord, values[:, component])
    return steepest_gradient_location(sol.x, sol.nodes[:, component])


# }}}


# {{{ config files


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("_", "-")] = value.strip()
    return out


# }}}
