"""Numerical convergence diagnostics for families and their hemigroups.

Locally uniform weak convergence is probed on finite grids: generating
families are compared through their drifts and the character distance of
their measures; hemigroups through increment moments over a triangular
time grid.  These are the test statistics behind all equivalence-of-
convergence checks in the acceptance suite: when the family distances of a
refinement sequence go to zero, the hemigroup distances of every law must
follow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .families import GeneratingFamily
from .hemigroups import (LawKind, classical_moment, boolean_eta_series,
                         free_eta_series, psi_from_eta)
from .loewner import transition_series
from .measures import char_distance
from .series import TruncatedSeries


@dataclass
class ReportEntry:
    value: float
    grid: str
    tolerance: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.tolerance is None:
            return None
        return self.value <= self.tolerance


@dataclass
class ConvergenceReport:
    entries: dict[str, ReportEntry] = field(default_factory=dict)

    def add(self, name: str, value: float, grid: str,
            tolerance: float | None = None) -> None:
        if value < 0.0:
            raise ValueError("distances are non-negative")
        self.entries[name] = ReportEntry(float(value), grid, tolerance)

    @property
    def max_value(self) -> float:
        return max((e.value for e in self.entries.values()), default=0.0)

    @property
    def passed(self) -> bool:
        return all(e.passed is not False for e in self.entries.values())

    def to_json_dict(self) -> dict:
        return {"entries": {
            name: {"value": e.value, "grid": e.grid,
                   "tolerance": e.tolerance, "passed": e.passed}
            for name, e in self.entries.items()}}


def _common_grid(a: GeneratingFamily, b: GeneratingFamily) -> np.ndarray:
    horizon = min(a.horizon, b.horizon)
    knots = np.concatenate([a.knots, b.knots, [horizon]])
    knots = np.unique(knots[knots <= horizon + 1e-12])
    return np.minimum(knots, horizon)


def family_distance(a: GeneratingFamily, b: GeneratingFamily, order: int = 8,
                    tolerance: float | None = None) -> ConvergenceReport:
    """Sup drift gap and sup character distance over the knot-union grid."""
    grid = _common_grid(a, b)
    label = f"{grid.size} knot-union times"
    report = ConvergenceReport()
    report.add("alpha_sup",
               max(abs(a.alpha_at(t) - b.alpha_at(t)) for t in grid),
               label, tolerance)
    report.add("sigma_char_sup",
               max(char_distance(a.sigma_at(t), b.sigma_at(t), order)
                   for t in grid),
               label, tolerance)
    return report


def _increment_moments(kind: LawKind, family: GeneratingFamily,
                       times: np.ndarray, n_max: int, order: int,
                       atol: float) -> np.ndarray:
    """Moments m_1..m_n of every increment on the triangular grid.

    Indexed ``[i, j, n-1]`` for times[i] <= times[j].  Monotone transitions
    are built once per grid interval and chained by composition.
    """
    size = times.size
    out = np.zeros((size, size, n_max), dtype=complex)
    if kind is LawKind.CLASSICAL:
        for i in range(size):
            for j in range(i, size):
                out[i, j] = [classical_moment(family, times[i], times[j], n)
                             for n in range(1, n_max + 1)]
        return out
    if kind is LawKind.MONOTONE:
        steps = [transition_series(family, a, b, order=order, atol=atol)
                 for a, b in zip(times[:-1], times[1:])]
        for i in range(size):
            eta = TruncatedSeries.identity(order)
            out[i, i] = psi_from_eta(eta).coeffs[1: n_max + 1]
            for j in range(i + 1, size):
                eta = eta.compose(steps[j - 1])
                out[i, j] = psi_from_eta(eta).coeffs[1: n_max + 1]
        return out
    builder = free_eta_series if kind is LawKind.FREE else boolean_eta_series
    for i in range(size):
        for j in range(i, size):
            eta = builder(family, times[i], times[j], order)
            out[i, j] = psi_from_eta(eta).coeffs[1: n_max + 1]
    return out


def hemigroup_distance(kind, a: GeneratingFamily, b: GeneratingFamily,
                       n_max: int = 8, num_times: int = 32,
                       order: int | None = None, atol: float = 1e-12,
                       tolerance: float | None = None) -> ConvergenceReport:
    """Sup moment gap of the increment laws over a triangular time grid.

    Negative moment orders add nothing (conjugates), so only 1..n_max are
    compared.
    """
    kind = LawKind(kind)
    if order is None:
        order = max(16, n_max)
    times = np.linspace(0.0, min(a.horizon, b.horizon), num_times)
    ma = _increment_moments(kind, a, times, n_max, order, atol)
    mb = _increment_moments(kind, b, times, n_max, order, atol)
    report = ConvergenceReport()
    report.add(f"{kind.value}_moment_sup", float(np.max(np.abs(ma - mb))),
               f"{num_times} times triangular, orders 1..{n_max}", tolerance)
    return report


@dataclass
class StudyRow:
    label: str
    family_value: float
    hemigroup_value: float


def equivalence_study(kind, target: GeneratingFamily, refinements,
                      order: int = 8, n_max: int = 4, num_times: int = 9,
                      atol: float = 1e-12) -> list[StudyRow]:
    """Distance table of a refinement sequence against its target.

    Callers assert that both columns decrease together; that is the
    numerical surrogate for the equivalence of family-level and
    hemigroup-level convergence.
    """
    rows = []
    for idx, approx in enumerate(refinements):
        fd = family_distance(target, approx, order)
        hd = hemigroup_distance(kind, target, approx, n_max=n_max,
                                num_times=num_times, atol=atol)
        rows.append(StudyRow(label=f"refinement {idx}",
                             family_value=fd.max_value,
                             hemigroup_value=hd.max_value))
    return rows
