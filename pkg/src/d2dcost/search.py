"""Exhaustive code search and repair-interval analysis.

Enumerates every realizable code of each family up to ``m_max`` nodes that
fits the cell's storage budget (m * alpha <= gamma_budget * F, checked in
exact rational arithmetic), evaluates the closed-form overall cost across a
repair-interval grid, and reports the cheapest code per grid point.  Also
locates the largest beneficial repair interval (the last point where the
overall cost still undercuts serving everything from the base station) and
the cost-minimizing interval for a single code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import CostQuery, limit_cost_infinity, limit_cost_zero, overall_cost
from .incoming import incoming_overall_cost
from .model import (
    CodeConstraintError,
    CodeFamily,
    CodeSpec,
    CostBreakdown,
    NetworkParams,
    Scheme,
    derive_code,
)

DEFAULT_M_MAX = 10
COARSE_GRID_POINTS = 121
DELTA_RESOLUTION = 1e-3  # in units of 1/mu


@dataclass(frozen=True)
class SearchSpec:
    """A code-search problem: network, scheme, budget, and the delta grid."""

    params: NetworkParams
    delta_grid: tuple[float, ...]
    scheme: Scheme = Scheme.CONVENTIONAL
    m_max: int = DEFAULT_M_MAX
    gamma_budget: float = 3.0
    incoming: bool = False

    def __post_init__(self) -> None:
        grid = tuple(float(d) for d in self.delta_grid)
        object.__setattr__(self, "delta_grid", grid)
        if not grid:
            raise ValueError("delta_grid must not be empty")
        if grid[0] != 0.0:
            raise ValueError("delta_grid must include 0 as its first point")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("delta_grid must be strictly increasing")
        if not self.gamma_budget > 1:
            raise ValueError("gamma_budget must exceed 1 file")
        if self.m_max < 2:
            raise ValueError("m_max must be at least 2")


@dataclass(frozen=True)
class MinCostPoint:
    """Cheapest code at one grid delta."""

    delta: float
    code: CodeSpec
    cost: CostBreakdown


def _candidate_triples(family: CodeFamily, m_max: int):
    """Yield (m, h, r) in deterministic ascending order for one family.

    Replication is its own family entry, so the coded families start at
    download locality h = 2; h = 1 would just re-enumerate replication.
    """
    for m in range(2, m_max + 1):
        if family is CodeFamily.REPLICATION:
            yield m, None, None
            continue
        for h in range(2, m):
            if family is CodeFamily.MDS:
                yield m, h, h
            elif family is CodeFamily.MSR:
                for r in range(max(2 * (h - 1), 1), m):
                    yield m, h, r
            elif family is CodeFamily.MBR:
                for r in range(h, m):
                    yield m, h, r
            else:  # LRC
                for r in range(1, h):
                    if m % (r + 1) == 0:
                        yield m, h, r


def enumerate_codes(spec: SearchSpec) -> list[CodeSpec]:
    """All budget-feasible codes, ordered by (family, m, h, r)."""
    budget = Fraction(spec.gamma_budget) * Fraction(spec.params.file_size)
    found = []
    for family in CodeFamily:
        for m, h, r in _candidate_triples(family, spec.m_max):
            try:
                code = derive_code(family, m, h, r,
                                   file_size=spec.params.file_size)
            except CodeConstraintError:
                continue
            if m * code.alpha <= budget:
                found.append(code)
    return found


def min_cost_curve(spec: SearchSpec) -> list[MinCostPoint]:
    """Cheapest enumerated code at every grid delta.

    Ties go to the earlier code in enumeration order, which keeps the output
    reproducible run to run.
    """
    codes = enumerate_codes(spec)
    if not codes:
        raise ValueError("no code fits the storage budget")
    cost_of = incoming_overall_cost if spec.incoming else overall_cost
    curve = []
    for delta in spec.delta_grid:
        best_code = None
        best_cost = None
        for code in codes:
            cost = cost_of(CostQuery(spec.params, code, delta, spec.scheme))
            if best_cost is None or cost.total < best_cost.total:
                best_code, best_cost = code, cost
        curve.append(MinCostPoint(delta=delta, code=best_code, cost=best_cost))
    return curve


def _total_cost(params: NetworkParams, code: CodeSpec, delta: float,
                scheme: Scheme) -> float:
    return overall_cost(CostQuery(params, code, delta, scheme)).total


def _coarse_grid(mu: float) -> np.ndarray:
    return np.geomspace(1e-3 / mu, 1e2 / mu, COARSE_GRID_POINTS)


def delta_max(params: NetworkParams, code: CodeSpec,
              scheme: Scheme = Scheme.CONVENTIONAL) -> float | None:
    """Largest repair interval at which storing beats pure BS download.

    Returns None when no interval is beneficial (including the delta -> 0
    limit), math.inf when the benefit persists through the whole coarse grid
    (the delta -> infinity cost only reaches the BS baseline asymptotically,
    never exceeds it), and otherwise the last grid crossing refined by
    bisection to 1e-3/mu.
    """
    if params.mu <= 0 or params.omega <= 0:
        raise ValueError("delta_max needs mu > 0 and omega > 0")
    threshold = limit_cost_infinity(params).total

    def beneficial(delta: float) -> bool:
        return _total_cost(params, code, delta, scheme) < threshold

    grid = _coarse_grid(params.mu)
    flags = [beneficial(d) for d in grid]
    if not any(flags):
        if not limit_cost_zero(params, code).total < threshold:
            return None
        lo, hi = 0.0, float(grid[0])  # beneficial only as delta -> 0
    else:
        last = max(i for i, ok in enumerate(flags) if ok)
        if last == len(grid) - 1:
            return math.inf
        lo, hi = float(grid[last]), float(grid[last + 1])

    resolution = DELTA_RESOLUTION / params.mu
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if beneficial(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def delta_opt(params: NetworkParams, code: CodeSpec,
              scheme: Scheme = Scheme.CONVENTIONAL) -> float:
    """Repair interval minimizing the overall cost; 0 when continuous repair wins.

    Scans the coarse grid capped at delta_max (when finite), refines the best
    cell with a bounded scalar minimization, and falls back to 0 whenever the
    delta -> 0 limit is at least as cheap as the best interior point.
    """
    if params.mu <= 0:
        raise ValueError("delta_opt needs mu > 0")
    cap = delta_max(params, code, scheme) if params.omega > 0 else None
    grid = _coarse_grid(params.mu)
    upper = float(grid[-1]) if cap is None or math.isinf(cap) else cap
    points = [float(d) for d in grid if d <= upper]
    if not points:
        points = [upper]

    evals = [_total_cost(params, code, d, scheme) for d in points]
    best = min(range(len(points)), key=evals.__getitem__)
    lo = points[best - 1] if best > 0 else 0.0
    hi = points[best + 1] if best + 1 < len(points) else points[-1]
    interior_delta = points[best]
    interior_total = evals[best]
    if hi > lo:
        refined = minimize_scalar(
            lambda d: _total_cost(params, code, d, scheme),
            bounds=(max(lo, 1e-12 / params.mu), hi),
            method="bounded",
            options={"xatol": DELTA_RESOLUTION / params.mu},
        )
        if refined.fun < interior_total:
            interior_delta, interior_total = float(refined.x), float(refined.fun)

    if limit_cost_zero(params, code).total <= interior_total:
        return 0.0
    return interior_delta
