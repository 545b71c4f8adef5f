"""Generating families: the shared parameter of all four hemigroups.

A generating family is a continuous drift ``alpha`` with ``alpha(0) = 0``
together with a time-increasing family of finite measures ``sigma_t`` with
``sigma_0 = 0``.  The data model here is piecewise linear in time: strictly
increasing knots, drift values at the knots (linearly interpolated), and one
non-negative interval measure per knot interval, so that

    sigma_t = sum of full interval measures before t
              + (elapsed fraction) * (active interval measure).

Piecewise-linear data automatically rules out time atoms of the induced
product measure, every interval carries a constant rate field, and knot
refinement converges to any continuous family, which is the approximation
contract this package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import TWO_PI, CircleMeasure
from .series import DEFAULT_ORDER


@dataclass(frozen=True)
class IntervalField:
    """Constant-rate field of one knot interval: drift rate and measure rate."""

    gamma: float
    rho: CircleMeasure


@dataclass(frozen=True)
class StandardTriple:
    """Per-interval rates in drift/gaussian/jump form.

    ``levy`` must be a finite-atom measure not charging the point 1; its
    contribution enters the interval measure with the weight ``1 - cos``.
    """

    drift: float
    gaussian: float
    levy: CircleMeasure


class GeneratingFamily:
    """Piecewise-linear drift plus per-interval measures on a finite horizon."""

    __slots__ = ("knots", "alpha", "measures")

    def __init__(self, knots, alpha, measures):
        knots = np.asarray(knots, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        measures = tuple(measures)
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("need at least two knots")
        if alpha.shape != knots.shape:
            raise ValueError("alpha values must match the knots")
        if len(measures) != knots.size - 1:
            raise ValueError("need one interval measure per knot interval")
        self.knots = knots
        self.alpha = alpha
        self.measures = measures

    # ------------------------------------------------------------- validation

    def validate(self) -> list[str]:
        """Report-style invariant check; empty list means the family is valid."""
        problems = []
        if self.knots[0] != 0.0:
            problems.append("knots must start at t = 0")
        if np.any(np.diff(self.knots) <= 0.0):
            problems.append("knots must be strictly increasing")
        if not np.all(np.isfinite(self.knots)):
            problems.append("knots must be finite")
        if self.alpha[0] != 0.0:
            problems.append("alpha(0) != 0")
        if not np.all(np.isfinite(self.alpha)):
            problems.append("alpha values must be finite")
        for i, m in enumerate(self.measures):
            if m.is_atomic:
                if m.weights.size and np.min(m.weights) < 0.0:
                    problems.append(f"interval measure {i} has a negative atom weight")
            else:
                mass = m.total_mass
                if mass < -1e-12:
                    problems.append(f"interval measure {i} has negative mass")
                elif np.any(np.abs(m.moments[1:]) > mass + 1e-10):
                    problems.append(
                        f"interval measure {i} has a moment larger than its mass")
                elif m.min_toeplitz_eigenvalue() < -1e-10:
                    problems.append(
                        f"interval measure {i} moment matrix is not positive semidefinite")
        return problems

    # ----------------------------------------------------------------- basics

    @property
    def horizon(self) -> float:
        return float(self.knots[-1])

    @property
    def num_intervals(self) -> int:
        return len(self.measures)

    def _check_time(self, t: float) -> float:
        t = float(t)
        if t < -1e-12 or t > self.horizon + 1e-12:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        return min(max(t, 0.0), self.horizon)

    def alpha_at(self, t: float) -> float:
        return float(np.interp(self._check_time(t), self.knots, self.alpha))

    def alpha_increment(self, s: float, t: float) -> float:
        return self.alpha_at(t) - self.alpha_at(s)

    def sigma_at(self, t: float) -> CircleMeasure:
        return self.sigma_increment(0.0, t)

    def sigma_increment(self, s: float, t: float) -> CircleMeasure:
        """The measure ``sigma_t - sigma_s`` (non-negative for s <= t)."""
        s = self._check_time(s)
        t = self._check_time(t)
        if s > t:
            raise ValueError("need s <= t")
        total = CircleMeasure.zero()
        for i in self._overlapping(s, t):
            lo = max(s, self.knots[i])
            hi = min(t, self.knots[i + 1])
            frac = (hi - lo) / (self.knots[i + 1] - self.knots[i])
            if frac > 0.0:
                piece = self.measures[i] if frac == 1.0 else self.measures[i].scaled(frac)
                total = total + piece
        return total

    def _overlapping(self, s: float, t: float) -> range:
        """Indices of knot intervals meeting (s, t)."""
        if t <= s:
            return range(0)
        first = int(np.searchsorted(self.knots, s, side="right")) - 1
        last = int(np.searchsorted(self.knots, t, side="left")) - 1
        return range(max(first, 0), min(last, self.num_intervals - 1) + 1)

    def interval_field(self, i: int) -> IntervalField:
        """Rates over interval ``i``: drift per unit time, measure per unit time."""
        dt = self.knots[i + 1] - self.knots[i]
        gamma = (self.alpha[i + 1] - self.alpha[i]) / dt
        return IntervalField(gamma=float(gamma), rho=self.measures[i].scaled(1.0 / dt))

    # --------------------------------------------------------------- the clock

    @property
    def interval_masses(self) -> np.ndarray:
        return np.array([m.total_mass for m in self.measures])

    @property
    def cumulative_masses(self) -> np.ndarray:
        """Total mass accumulated by each knot."""
        return np.concatenate([[0.0], np.cumsum(self.interval_masses)])

    def mass_clock(self, t: float) -> float:
        """Total mass accumulated by time ``t`` (continuous, non-decreasing)."""
        return float(np.interp(self._check_time(t), self.knots, self.cumulative_masses))

    def reparam_tau(self, u: float) -> float:
        """Right-continuous generalized inverse of the mass clock.

        Returns the supremum of the times at which the clock equals ``u``,
        so idle stretches (zero-mass intervals) are jumped past.
        """
        acc = self.cumulative_masses
        if u < -1e-12 or u > acc[-1] + 1e-12:
            raise ValueError(f"mass value {u} outside [0, {acc[-1]}]")
        u = min(max(u, 0.0), acc[-1])
        j = int(np.searchsorted(acc, u, side="right")) - 1
        if j >= self.num_intervals:
            return self.horizon
        # searchsorted lands past every plateau, so acc[j+1] > acc[j] here
        frac = (u - acc[j]) / (acc[j + 1] - acc[j])
        return float(self.knots[j] + frac * (self.knots[j + 1] - self.knots[j]))

    # ------------------------------------------------------------- refinement

    def resample(self, new_knots) -> "GeneratingFamily":
        """Piecewise-linear family sampled at the given knots.

        Exact when the new knots refine the old ones; an approximation (with
        the same endpoint values) otherwise.
        """
        new_knots = np.asarray(new_knots, dtype=float)
        alpha = np.array([self.alpha_at(t) for t in new_knots])
        measures = [self.sigma_increment(a, b)
                    for a, b in zip(new_knots[:-1], new_knots[1:])]
        return GeneratingFamily(new_knots, alpha, measures)

    def uniform_knots(self, num_intervals: int) -> np.ndarray:
        return np.linspace(0.0, self.horizon, num_intervals + 1)

    # --------------------------------------------------------------- builders

    @classmethod
    def from_standard_triples(cls, knots, triples) -> "GeneratingFamily":
        """Assemble a family from per-interval drift/gaussian/jump rates."""
        knots = np.asarray(knots, dtype=float)
        triples = list(triples)
        if len(triples) != knots.size - 1:
            raise ValueError("need one standard triple per knot interval")
        alpha = [0.0]
        measures = []
        for i, tr in enumerate(triples):
            dt = knots[i + 1] - knots[i]
            alpha.append(alpha[-1] + tr.drift * dt)
            if tr.gaussian < 0.0:
                raise ValueError("gaussian rate must be non-negative")
            if not tr.levy.is_atomic:
                raise ValueError("levy rate must be a finite-atom measure")
            th = tr.levy.thetas
            dist = np.minimum(th, TWO_PI - th)
            if np.any(dist < 1e-12):
                raise ValueError("levy measure must not charge the point 1")
            pieces = [(0.0, 0.5 * tr.gaussian * dt)] if tr.gaussian > 0.0 else []
            pieces += [(a, (1.0 - np.cos(a)) * w * dt)
                       for a, w in zip(th, tr.levy.weights)]
            measures.append(CircleMeasure.from_atoms(pieces))
        return cls(knots, alpha, measures)

    # ----------------------------------------------------------------- codecs

    def to_json_dict(self) -> dict:
        return {
            "knots": [{"t": float(t), "alpha": float(a)}
                      for t, a in zip(self.knots, self.alpha)],
            "interval_measures": [m.to_json_dict() for m in self.measures],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GeneratingFamily":
        if not isinstance(data, dict):
            raise ValueError("family must be a JSON object")
        try:
            knots = [k["t"] for k in data["knots"]]
            alpha = [k["alpha"] for k in data["knots"]]
            measures = [CircleMeasure.from_json_dict(m)
                        for m in data["interval_measures"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed family: {exc}") from exc
        return cls(knots, alpha, measures)


# ----------------------------------------------------------- standard families

def zero_family(horizon: float = 1.0) -> GeneratingFamily:
    """No drift, no measure: every hemigroup degenerates to the point mass at 1."""
    return GeneratingFamily([0.0, horizon], [0.0, 0.0], [CircleMeasure.zero()])


def normal_family(horizon: float = 1.0, rate: float = 1.0) -> GeneratingFamily:
    """``sigma_t = (rate * t / 2) * dirac(1)`` with zero drift."""
    atom = CircleMeasure.dirac(0.0, 0.5 * rate * horizon)
    return GeneratingFamily([0.0, horizon], [0.0, 0.0], [atom])


def rotation_family(rate: float = 1.0, horizon: float = 1.0) -> GeneratingFamily:
    """Pure drift ``alpha_t = rate * t``; all hemigroups are point masses."""
    return GeneratingFamily([0.0, horizon], [0.0, rate * horizon],
                            [CircleMeasure.zero()])


def haar_family(rate: float = 1.0, horizon: float = 1.0,
                order: int = DEFAULT_ORDER) -> GeneratingFamily:
    """Rotation-invariant measure accumulating at the given mass rate."""
    return GeneratingFamily([0.0, horizon], [0.0, 0.0],
                            [CircleMeasure.haar(rate * horizon, order)])


def two_atom_family(horizon: float = 1.0, angles=(2.0, 4.5), rates=(0.3, 0.2),
                    drift_rate: float = 0.25) -> GeneratingFamily:
    """Two fixed atoms accumulating linearly, plus a constant drift."""
    atoms = CircleMeasure.from_atoms(
        (a, r * horizon) for a, r in zip(angles, rates))
    return GeneratingFamily([0.0, horizon], [0.0, drift_rate * horizon], [atoms])


def slit_family(knots, angle, rate=1.0) -> GeneratingFamily:
    """One moving atom per interval, sampled at the interval midpoint.

    ``angle`` maps time to the atom's angle; ``rate`` is a constant or a
    callable mass rate.  This is the piecewise approximation of a chain
    driven by a single boundary point moving along the circle.
    """
    knots = np.asarray(knots, dtype=float)
    rate_fn = rate if callable(rate) else (lambda _t, _r=float(rate): _r)
    measures = []
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        measures.append(CircleMeasure.dirac(angle(mid), rate_fn(mid) * (b - a)))
    return GeneratingFamily(knots, np.zeros_like(knots), measures)


def save_family(family: GeneratingFamily, path) -> None:
    import json

    with open(path, "w") as fh:
        json.dump(family.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_family(path) -> GeneratingFamily:
    import json

    with open(path) as fh:
        return GeneratingFamily.from_json_dict(json.load(fh))
