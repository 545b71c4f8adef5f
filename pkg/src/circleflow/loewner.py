"""Radial Loewner flow: solving, certification, and generator extraction.

The monotone hemigroup of a generating family is a decreasing chain of
univalent self-maps of the disk fixing 0.  Its transition mappings solve a
transport equation driven by ``-z p(z, t)`` where ``p`` has non-negative
real part; for the piecewise-linear families used here ``p`` is constant on
every knot interval.  The maps are evaluated by the method of
characteristics: ``dz/dtau = z p(z, tau)`` integrated backward from the
upper time to the lower one, which contracts trajectories towards the
origin and therefore never leaves the disk.

Series representations of the chain are recovered from circle samples of
the solved maps by discrete Fourier analysis, and the converse direction,
recovering the generating family from a sampled chain, is a finite
difference of the same transport equation carried out in series arithmetic.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .families import GeneratingFamily
from .measures import CircleMeasure
from .series import DEFAULT_ORDER, TruncatedSeries, _div_coeffs

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Characteristic integration failed; carries the time of failure."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


# ------------------------------------------------------------- the integrator
#
# Dormand-Prince 5(4) embedded pair.  Hand-rolled rather than delegated so
# that every accepted step can assert the backward Schwarz contraction and
# zero-measure intervals can be handled in closed form.

_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_ERR = _B5 - _B4

_MIN_STEP_FRACTION = 1e-14
_CONTRACTION_SLACK = 1e-9


def _integrate_interval(y: np.ndarray, gamma: float, rho: CircleMeasure,
                        span: float, atol: float, tau_hi: float) -> np.ndarray:
    """Backward characteristics across one constant-field interval.

    Integrates ``dy/dsigma = y (i gamma - H_rho(y))`` forward in the
    reversed time ``sigma = tau_hi - tau`` over ``[0, span]``, which keeps
    ``|y|`` non-increasing (asserted per accepted step).
    """

    def rhs(w):
        return w * (1j * gamma - rho.herglotz_eval(w))

    done = 0.0
    h = min(span, 0.5 / (rho.total_mass + abs(gamma) + 1.0))
    while span - done > 1e-16 * span:
        h = min(h, span - done)
        k = [rhs(y)]
        for row in _A:
            k.append(rhs(y + h * sum(a * ki for a, ki in zip(row, k))))
        y5 = y + h * sum(b * ki for b, ki in zip(_B5, k) if b)
        err = float(np.max(np.abs(h * sum(e * ki for e, ki in zip(_ERR, k) if e))))
        if err <= atol:
            if np.any(np.abs(y5) > np.abs(y) + _CONTRACTION_SLACK):
                raise SolverError(
                    "backward characteristic stopped contracting",
                    time=tau_hi - done)
            y = y5
            done += h
        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (atol / err) ** 0.2))
        h *= factor
        if h < _MIN_STEP_FRACTION * max(span, 1.0):
            raise SolverError("step-size underflow", time=tau_hi - done)
    return y


def solve_transition(family: GeneratingFamily, s: float, t: float, z,
                     atol: float = 1e-12):
    """Transition mapping value(s) ``eta_{s,t}(z)`` for ``|z| < 1``.

    ``z`` may be a scalar or an array; all points are integrated together.
    Intervals with no measure are pure rotations and are applied in closed
    form (in particular, idle intervals are skipped exactly).
    """
    s, t = float(s), float(t)
    if not 0.0 <= s <= t <= family.horizon + 1e-12:
        raise ValueError(f"need 0 <= s <= t <= {family.horizon}")
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) >= 1.0):
        raise ValueError("z on or outside the unit circle")
    y = za.reshape(-1).copy()
    if t > s:
        for i in reversed(family._overlapping(s, t)):
            lo = max(s, float(family.knots[i]))
            hi = min(t, float(family.knots[i + 1]))
            if hi <= lo:
                continue
            field = family.interval_field(i)
            if field.rho.total_mass == 0.0:
                if field.gamma != 0.0:
                    y *= np.exp(1j * field.gamma * (hi - lo))
            else:
                y = _integrate_interval(y, field.gamma, field.rho,
                                        hi - lo, atol, hi)
    return complex(y[0]) if za.ndim == 0 else y.reshape(za.shape)


def solve_characteristic(family: GeneratingFamily, s: float, t: float,
                         z: complex, atol: float = 1e-12) -> complex:
    """Scalar transition value; see :func:`solve_transition`."""
    return solve_transition(family, s, t, complex(z), atol=atol)


# ------------------------------------------------------- series of the chain

def _fourier_points(order: int, points: int | None) -> int:
    if points is None:
        points = 64
        while points < 2 * order + 2:
            points *= 2
        return points
    if points < 2 * order + 2 or points & (points - 1):
        raise ValueError("points must be a power of two with points >= 2*order+2")
    return points


def transition_series(family: GeneratingFamily, s: float, t: float,
                      order: int = DEFAULT_ORDER, points: int | None = None,
                      radius: float = 0.5, atol: float = 1e-12) -> TruncatedSeries:
    """Taylor series of ``eta_{s,t}`` from circle samples of the solved map.

    The map is evaluated at ``points`` equispaced samples of ``|z| = radius``
    and the coefficients are read off the discrete Fourier transform; the
    sampled function is bounded by 1, so aliasing decays like radius^points.
    """
    if family.mass_clock(t) - family.mass_clock(s) <= 0.0:
        # measure-free stretch: the map is exactly a rotation
        coeffs = np.zeros(order + 1, dtype=complex)
        coeffs[1] = np.exp(1j * family.alpha_increment(s, t))
        return TruncatedSeries(coeffs)
    m = _fourier_points(order, points)
    grid = radius * np.exp(2j * np.pi * np.arange(m) / m)
    values = solve_transition(family, s, t, grid, atol=atol)
    coeffs = np.fft.fft(values)[: order + 1] / m
    coeffs /= radius ** np.arange(order + 1)
    if abs(coeffs[0]) > 1e-9:
        raise SolverError("chain series acquired a constant term", time=t)
    coeffs[0] = 0.0
    return TruncatedSeries(coeffs)


@dataclass(frozen=True)
class ChainSample:
    """A chain sampled on a time grid as truncated series of the maps."""

    times: np.ndarray
    series: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "series", tuple(self.series))
        if self.times.ndim != 1 or self.times.size != len(self.series):
            raise ValueError("need one series per sample time")

    @property
    def order(self) -> int:
        return self.series[0].order

    @property
    def derivatives_at_zero(self) -> np.ndarray:
        return np.array([s.coeffs[1] for s in self.series])

    @property
    def rotation_angles(self) -> np.ndarray:
        """Unwrapped arguments of the derivatives at 0, pinned to 0 at t_0."""
        a = np.unwrap(np.angle(self.derivatives_at_zero))
        return a - a[0]

    @property
    def log_contraction(self) -> np.ndarray:
        """``-log |c_1|`` along the chain; non-decreasing by Schwarz."""
        return -np.log(np.abs(self.derivatives_at_zero))

    def coefficient_matrix(self) -> np.ndarray:
        return np.array([s.coeffs for s in self.series])

    def check(self) -> list[str]:
        problems = []
        if self.times[0] != 0.0:
            problems.append("chain must start at time 0")
        if np.any(np.diff(self.times) <= 0.0):
            problems.append("sample times must be strictly increasing")
        c = self.coefficient_matrix()
        if np.max(np.abs(c[:, 0])) > 1e-9:
            problems.append("maps must vanish at 0")
        ident = TruncatedSeries.identity(self.order)
        if np.max(np.abs(c[0] - ident.coeffs)) > 1e-9:
            problems.append("chain must start at the identity map")
        if np.any(np.diff(np.abs(c[:, 1])) > _CONTRACTION_SLACK):
            problems.append("derivative at 0 must be non-increasing in modulus")
        return problems

    def rotated(self) -> tuple["ChainSample", np.ndarray]:
        """Remove the rotation part: ``g_j(z) = f_j(e^{-i alpha_j} z)``.

        Returns the normalized chain (positive derivatives at 0) and the
        removed angles.
        """
        alpha = self.rotation_angles
        ks = np.arange(self.order + 1)
        rotated = [TruncatedSeries(s.coeffs * np.exp(-1j * ks * a))
                   for s, a in zip(self.series, alpha)]
        return ChainSample(self.times, rotated), alpha

    # ------------------------------------------------------------------ codecs

    def to_json_dict(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "series": [[[float(c.real), float(c.imag)] for c in s.coeffs]
                       for s in self.series],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChainSample":
        try:
            times = data["times"]
            series = [TruncatedSeries([complex(re, im) for re, im in row])
                      for row in data["series"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed chain: {exc}") from exc
        return cls(times, series)


def solve_chain(family: GeneratingFamily, num_intervals: int = 64,
                times=None, order: int = DEFAULT_ORDER,
                points: int | None = None, radius: float = 0.5,
                atol: float = 1e-12) -> ChainSample:
    """Solve the chain on a time grid by composing interval transitions.

    Truncated composition is exact at the working order, so the error budget
    is the integrator tolerance per interval plus Fourier aliasing.
    """
    if times is None:
        times = family.uniform_knots(num_intervals)
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0.0):
        raise ValueError("times must increase strictly from 0")
    chain = [TruncatedSeries.identity(order)]
    for a, b in zip(times[:-1], times[1:]):
        step = transition_series(family, a, b, order=order, points=points,
                                 radius=radius, atol=atol)
        chain.append(chain[-1].compose(step))
    return ChainSample(times, chain)


def save_chain(chain: ChainSample, path) -> None:
    with open(path, "w") as fh:
        json.dump(chain.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_chain(path) -> ChainSample:
    with open(path) as fh:
        return ChainSample.from_json_dict(json.load(fh))


# ------------------------------------------------------------------ H-families

@dataclass(frozen=True)
class HFamilyRep:
    """Measure-valued Herglotz driver of a normalized chain.

    Interval rates of the product measure on circle x time; the imaginary
    drift component is identically zero for chains with positive derivative
    at 0, and nonzero input is rejected.
    """

    knots: np.ndarray
    rates: tuple
    phi: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        object.__setattr__(self, "rates", tuple(self.rates))
        if self.knots.size - 1 != len(self.rates):
            raise ValueError("need one rate measure per knot interval")
        if self.phi is not None and np.any(np.asarray(self.phi) != 0.0):
            raise ValueError("the imaginary drift component must be zero")

    @classmethod
    def from_family(cls, family: GeneratingFamily) -> "HFamilyRep":
        """Driver of the normalized chain: rates pulled back by the drift.

        Uses the midpoint drift angle on each interval, matching the
        push-forward convention of the extraction step.
        """
        rates = []
        for i in range(family.num_intervals):
            field = family.interval_field(i)
            mid = 0.5 * (family.alpha[i] + family.alpha[i + 1])
            rates.append(field.rho.rotated(-mid))
        return cls(family.knots, rates)

    def scaled(self, c: float) -> "HFamilyRep":
        return HFamilyRep(self.knots, [r.scaled(c) for r in self.rates])

    def eval(self, z, lo: float, hi: float):
        """``Q(z, [lo, hi])``; additive over disjoint time intervals."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1.0):
            raise ValueError("z on or outside the unit circle")
        if hi < lo or lo < self.knots[0] - 1e-12 or hi > self.knots[-1] + 1e-12:
            raise ValueError("interval outside the driver horizon")
        total = np.zeros(z.shape, dtype=complex)
        for i in range(len(self.rates)):
            width = min(hi, self.knots[i + 1]) - max(lo, self.knots[i])
            if width > 0.0:
                total = total + width * self.rates[i].herglotz_eval(z)
        return complex(total) if z.ndim == 0 else total


def disk_grid(radii, num_angles: int = 8) -> np.ndarray:
    """Evaluation points on a few circles inside the disk."""
    angles = 2.0 * np.pi * np.arange(num_angles) / num_angles
    return np.concatenate([r * np.exp(1j * angles) for r in np.atleast_1d(radii)])


def _evaluate_rows(coeff_matrix: np.ndarray, z: np.ndarray) -> np.ndarray:
    powers = z[None, :] ** np.arange(coeff_matrix.shape[1])[:, None]
    return coeff_matrix @ powers


def integral_residual(chain: ChainSample, driver: HFamilyRep,
                      z_points=None) -> float:
    """Largest defect of the integral equation of a normalized chain.

    Checks ``g_t(z) = z - z * integral of dg/dz against the driver`` with
    the time integral discretized by the midpoint rule on the chain's grid
    (endpoint-averaged derivatives).  Zero for an exact chain/driver pair up
    to quadrature and solver error; order-one for a mismatched driver.
    """
    if z_points is None:
        z_points = disk_grid((0.1, 0.2, 0.3, 0.4, 0.5))
    z = np.asarray(z_points, dtype=complex).reshape(-1)
    c = chain.coefficient_matrix()
    values = _evaluate_rows(c, z)
    deriv_coeffs = c[:, 1:] * np.arange(1, chain.order + 1)
    derivs = _evaluate_rows(deriv_coeffs, z)
    q = np.array([driver.eval(z, chain.times[i], chain.times[i + 1])
                  for i in range(chain.times.size - 1)])
    mid = 0.5 * (derivs[:-1] + derivs[1:])
    acc = np.cumsum(mid * q, axis=0)
    residual = values - z[None, :]
    residual[1:] += z[None, :] * acc
    return float(np.max(np.abs(residual)))


# ------------------------------------------------------------------ extraction

@dataclass
class ExtractionDiagnostics:
    min_eigenvalue: float
    max_adjustment: float
    clipped_intervals: int


@dataclass
class ExtractionResult:
    family: GeneratingFamily
    diagnostics: ExtractionDiagnostics


def extract_generating_family(chain: ChainSample, moment_order: int | None = None,
                              psd_tol: float = 1e-12) -> ExtractionResult:
    """Recover the generating family of a sampled chain.

    Per interval, the rate field is the finite-difference quotient of the
    transport equation computed in series arithmetic,

        rate(z) = (g_j(z) - g_{j+1}(z)) / (dt * z * dg/dz),

    with the derivative averaged over the interval endpoints (second order
    in the grid step).  The rate's coefficients are Herglotz data: the
    constant term is the mass rate and coefficient k is twice the k-th
    moment rate.  The quotient's noise grows with the coefficient index, so
    only moments up to ``moment_order`` (default: min(order - 1, 16)) are
    kept.  Moment matrices that discretization noise pushed outside the PSD
    cone are projected back (mass preserved) and the adjustment is reported.
    """
    problems = chain.check()
    if problems:
        raise ValueError("chain sample is corrupt: " + "; ".join(problems))
    order = chain.order
    if moment_order is None:
        moment_order = min(order - 1, 16)
    if not 1 <= moment_order <= order - 1:
        raise ValueError(f"moment order must lie in [1, {order - 1}]")
    c1 = chain.derivatives_at_zero
    if np.any(np.abs(c1) == 0.0):
        raise ValueError("chain sample is corrupt: vanishing derivative at 0")
    alpha = chain.rotation_angles
    ks = np.arange(order + 1)
    g = np.array([s.coeffs * np.exp(-1j * ks * a)
                  for s, a in zip(chain.series, alpha)])
    weights = np.arange(1, order + 1)

    measures = []
    min_eig = np.inf
    max_adjust = 0.0
    clipped = 0
    for j in range(chain.times.size - 1):
        dt = chain.times[j + 1] - chain.times[j]
        numer = (g[j] - g[j + 1])[1:]                      # divided by z
        deriv = 0.5 * (g[j, 1:] + g[j + 1, 1:]) * weights  # averaged dg/dz
        rate = _div_coeffs(numer, deriv) / dt
        mass = rate[0].real * dt
        moments = 0.5 * rate[1 : moment_order + 1] * dt
        measure = CircleMeasure.from_moments(mass, moments)
        eig = measure.min_toeplitz_eigenvalue()
        min_eig = min(min_eig, eig)
        if eig < -psd_tol:
            measure, adjustment = measure.nearest_psd(preserve_mass=True)
            clipped += 1
            max_adjust = max(max_adjust, adjustment)
            log.debug("interval %d clipped to the PSD cone (eig %.3g, moved %.3g)",
                      j, eig, adjustment)
        mid = 0.5 * (alpha[j] + alpha[j + 1])
        measures.append(measure.rotated(mid))
    family = GeneratingFamily(chain.times, alpha, measures)
    diagnostics = ExtractionDiagnostics(
        min_eigenvalue=float(min_eig), max_adjustment=float(max_adjust),
        clipped_intervals=clipped)
    return ExtractionResult(family=family, diagnostics=diagnostics)


# ------------------------------------------------------------------- gap bound

@dataclass
class GapReport:
    min_slack: float
    pairs: int
    points: int


def gap_bound_check(chain: ChainSample, radii=(0.3, 0.5, 0.7),
                    num_angles: int = 8) -> GapReport:
    """Distortion bound between any two maps of a normalized chain.

    For ``s <= t`` the gap ``|g_s(z) - g_t(z)|`` is bounded by
    ``8 |z| / (1 - |z|)^4`` times the increment of the reciprocal
    derivative at 0.  Returns the smallest slack of the bound over all
    sample pairs and the given circles; negative slack means a violation.
    """
    c1 = chain.derivatives_at_zero
    if np.max(np.abs(c1.imag)) > 1e-9 * np.max(np.abs(c1)):
        raise ValueError("gap bound needs a rotated chain (real derivatives at 0)")
    z = disk_grid(radii, num_angles)
    values = _evaluate_rows(chain.coefficient_matrix(), z)
    inv_deriv = 1.0 / c1.real
    i_s, i_t = np.triu_indices(chain.times.size, k=1)
    lhs = np.abs(values[i_s] - values[i_t])
    envelope = 8.0 * np.abs(z) / (1.0 - np.abs(z)) ** 4
    rhs = envelope[None, :] * (inv_deriv[i_t] - inv_deriv[i_s])[:, None]
    slack = float(np.min(rhs - lhs))
    return GapReport(min_slack=slack, pairs=int(i_s.size), points=int(z.size))
