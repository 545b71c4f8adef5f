"""The four convolution hemigroups sharing one generating family.

Increment laws of a family ``(alpha_t, sigma_t)`` between times ``s <= t``:

* classical: moments ``exp(i n alpha + integral K_n d sigma)`` where ``K_n``
  is the continuous circle kernel with ``K_n(1) = -n^2``;
* free: Sigma-transform ``exp(-i alpha + H_sigma(z))``;
* boolean: eta-transform ``z exp(i alpha - H_sigma(z))``;
* monotone: eta-transform given by the transition mapping of the radial
  Loewner flow driven by the family's interval fields.

``H_sigma`` is the Herglotz transform.  All series identities are exact at
the truncation order; only the monotone law involves an ODE solve.
"""

from __future__ import annotations

import enum

import numpy as np

from .families import GeneratingFamily
from .measures import CircleMeasure
from .series import DEFAULT_ORDER, TruncatedSeries


class LawKind(enum.Enum):
    CLASSICAL = "classical"
    FREE = "free"
    BOOLEAN = "boolean"
    MONOTONE = "monotone"


# --------------------------------------------------------------- classical law

def kernel_coefficients(n: int) -> np.ndarray:
    """Polynomial coefficients of the order-n increment kernel.

    ``K_n(xi) = (xi^n - 1 - i n Im(xi)) / (1 - Re(xi))`` with the removable
    singularity ``K_n(1) = -n^2`` is, exactly, the trigonometric polynomial
    ``n - 2 sum_{k=0}^{n-1} (n - k) xi^k``.  Returned indexed by the power
    of xi, so the integral against a measure is a dot with its moments.
    """
    if n < 1:
        raise ValueError("kernel order must be positive")
    coeffs = -2.0 * (n - np.arange(n)).astype(complex)
    coeffs[0] += n
    return coeffs


def kernel_integral(measure: CircleMeasure, n: int) -> complex:
    """``integral K_n d(measure)``, via the moments ``m_0 .. m_{n-1}``."""
    return complex(np.dot(kernel_coefficients(n), measure.moments_to(n - 1)))


def classical_moment(family: GeneratingFamily, s: float, t: float, n: int) -> complex:
    """Moment of order ``n`` of the classical increment law between s and t.

    Always of modulus at most one; negative orders by conjugation.
    """
    n = int(n)
    if n == 0:
        return 1.0 + 0.0j
    a = family.alpha_increment(s, t)
    sig = family.sigma_increment(s, t)
    val = np.exp(1j * abs(n) * a + kernel_integral(sig, abs(n)))
    return complex(val) if n > 0 else complex(np.conj(val))


# -------------------------------------------------------------------- free law

def free_sigma_series(family: GeneratingFamily, s: float, t: float,
                      order: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Sigma-transform series of the free increment law between s and t."""
    h = family.sigma_increment(s, t).herglotz_series(order)
    return (h - 1j * family.alpha_increment(s, t)).exp()


def free_eta_series(family: GeneratingFamily, s: float, t: float,
                    order: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Eta-transform series of the free increment law.

    Obtained by reverting ``z * Sigma(z)`` (Lagrange inversion via Newton
    iteration), which is exact at the truncation order and avoids any
    pointwise branch tracking.
    """
    inverse = free_sigma_series(family, s, t, order).shifted(1)
    return inverse.reversion()


def free_eta_value(family: GeneratingFamily, s: float, t: float, z: complex,
                   max_iterations: int = 60) -> complex:
    """Pointwise free eta value by Newton iteration; cross-check only.

    Solves ``w * Sigma(w) = z`` seeded at ``z / Sigma(0)``; raises if the
    iteration leaves the disk or fails to settle.
    """
    a = family.alpha_increment(s, t)
    sig = family.sigma_increment(s, t)

    def inv_and_deriv(w):
        h = sig.herglotz_eval(w)
        xi = np.exp(1j * sig.thetas) if sig.is_atomic else None
        if xi is not None:
            hp = np.sum(sig.weights * 2.0 * xi / (1.0 - w * xi) ** 2)
        else:
            hp = sig.herglotz_series(sig.moment_order).derivative()(w)
        sigma = np.exp(-1j * a + h)
        return w * sigma - z, sigma * (1.0 + w * hp)

    w = z * np.exp(1j * a - sig.total_mass)
    for _ in range(max_iterations):
        val, deriv = inv_and_deriv(w)
        step = val / deriv
        w = w - step
        if abs(w) >= 1.0:
            raise ValueError("pointwise eta evaluation left the unit disk")
        if abs(step) < 1e-14:
            return complex(w)
    raise ValueError("pointwise eta evaluation did not converge")


# ----------------------------------------------------------------- boolean law

def boolean_eta_series(family: GeneratingFamily, s: float, t: float,
                       order: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Eta-transform series of the boolean increment law between s and t."""
    h = family.sigma_increment(s, t).herglotz_series(order)
    return (1j * family.alpha_increment(s, t) - h).exp().shifted(1)


# ---------------------------------------------------------------- monotone law

def monotone_eta(family: GeneratingFamily, s: float, t: float, z,
                 atol: float = 1e-12):
    """Transition mapping of the monotone hemigroup, evaluated at ``z``."""
    from .loewner import solve_characteristic

    return solve_characteristic(family, s, t, z, atol=atol)


def monotone_eta_series(family: GeneratingFamily, s: float, t: float,
                        order: int = DEFAULT_ORDER, **solver) -> TruncatedSeries:
    from .loewner import transition_series

    return transition_series(family, s, t, order=order, **solver)


# ----------------------------------------------------------------- moment view

def psi_from_eta(eta: TruncatedSeries) -> TruncatedSeries:
    """Moment generating series ``psi = eta / (1 - eta)``."""
    return eta / (1.0 - eta)


def _series_moment(eta: TruncatedSeries, n: int) -> complex:
    m = abs(int(n))
    if m == 0:
        return 1.0 + 0.0j
    if m > eta.order:
        raise ValueError(f"moment order {m} exceeds series order {eta.order}")
    val = psi_from_eta(eta).coeffs[m]
    return complex(val) if n > 0 else complex(np.conj(val))


def free_moment(family: GeneratingFamily, s: float, t: float, n: int,
                order: int | None = None) -> complex:
    """Moment of the free increment law; Haar-degenerate increments rejected."""
    mean = np.exp(-family.sigma_increment(s, t).total_mass)
    if mean < 1e-12:
        raise ValueError(
            "free increment mean below 1e-12; the transform degenerates "
            "towards the rotation-invariant law")
    order = order if order is not None else max(DEFAULT_ORDER, abs(int(n)))
    return _series_moment(free_eta_series(family, s, t, order), n)


def boolean_moment(family: GeneratingFamily, s: float, t: float, n: int,
                   order: int | None = None) -> complex:
    order = order if order is not None else max(DEFAULT_ORDER, abs(int(n)))
    return _series_moment(boolean_eta_series(family, s, t, order), n)


def monotone_moment(family: GeneratingFamily, s: float, t: float, n: int,
                    order: int | None = None, **solver) -> complex:
    order = order if order is not None else max(DEFAULT_ORDER, abs(int(n)))
    return _series_moment(monotone_eta_series(family, s, t, order, **solver), n)


def moment(kind, family: GeneratingFamily, s: float, t: float, n: int,
           order: int | None = None, **solver) -> complex:
    """Moment of order ``n`` of the increment law of the requested kind."""
    kind = LawKind(kind)
    if kind is LawKind.CLASSICAL:
        return classical_moment(family, s, t, n)
    if kind is LawKind.FREE:
        return free_moment(family, s, t, n, order)
    if kind is LawKind.BOOLEAN:
        return boolean_moment(family, s, t, n, order)
    return monotone_moment(family, s, t, n, order, **solver)
