"""Finite non-negative measures on the unit circle.

Two interchangeable representations are supported:

* a finite list of atoms ``(theta, weight)`` with angles in radians, and
* a truncated trigonometric moment sequence ``(mass, m_1, ..., m_N)`` with
  ``m_k = integral of xi^k``.

Atom measures know every moment exactly; moment-form measures only up to the
stored order.  Converting atoms to moments is exact.  The reverse is
ill-posed and is not offered; a Fejer-kernel density sketch is available for
plotting instead.  A valid moment sequence has a positive semidefinite
Hermitian Toeplitz matrix ``[m_{j-k}]``, which is what the validators check.
"""

from __future__ import annotations

import numpy as np

from .series import DEFAULT_ORDER, TruncatedSeries

TWO_PI = 2.0 * np.pi


class CircleMeasure:
    """A finite measure on the unit circle (atoms or truncated moments)."""

    __slots__ = ("thetas", "weights", "moments")

    def __init__(self, thetas=None, weights=None, moments=None):
        if moments is None:
            thetas = np.atleast_1d(np.asarray(
                [] if thetas is None else thetas, dtype=float))
            weights = np.atleast_1d(np.asarray(
                [] if weights is None else weights, dtype=float))
            if thetas.shape != weights.shape:
                raise ValueError("thetas and weights must have equal length")
            self.thetas = np.mod(thetas, TWO_PI)
            self.weights = weights
            self.moments = None
        else:
            if thetas is not None or weights is not None:
                raise ValueError("pass either atoms or moments, not both")
            m = np.atleast_1d(np.asarray(moments, dtype=complex))
            if m.size < 1:
                raise ValueError("moment sequence must contain the mass m_0")
            self.thetas = None
            self.weights = None
            self.moments = m

    # ------------------------------------------------------------ constructors

    @classmethod
    def from_atoms(cls, pairs) -> "CircleMeasure":
        """Build from an iterable of ``(theta, weight)`` pairs."""
        pairs = list(pairs)
        if not pairs:
            return cls.zero()
        th, w = zip(*pairs)
        return cls(thetas=th, weights=w)

    @classmethod
    def dirac(cls, theta: float, weight: float = 1.0) -> "CircleMeasure":
        return cls(thetas=[theta], weights=[weight])

    @classmethod
    def zero(cls) -> "CircleMeasure":
        return cls(thetas=[], weights=[])

    @classmethod
    def haar(cls, mass: float = 1.0, order: int = DEFAULT_ORDER) -> "CircleMeasure":
        """Rotation-invariant measure: all moments beyond the mass vanish."""
        m = np.zeros(order + 1, dtype=complex)
        m[0] = mass
        return cls(moments=m)

    @classmethod
    def from_moments(cls, mass: float, values) -> "CircleMeasure":
        """Build from the mass and the moments ``m_1 .. m_N``."""
        vals = np.atleast_1d(np.asarray(values, dtype=complex))
        return cls(moments=np.concatenate(([complex(mass)], vals)))

    # ---------------------------------------------------------------- queries

    @property
    def is_atomic(self) -> bool:
        return self.moments is None

    @property
    def total_mass(self) -> float:
        if self.is_atomic:
            return float(np.sum(self.weights)) if self.weights.size else 0.0
        return float(self.moments[0].real)

    @property
    def moment_order(self):
        """Highest stored moment order, or ``None`` when unbounded (atoms)."""
        return None if self.is_atomic else self.moments.size - 1

    def moment(self, k: int) -> complex:
        """``m_k = integral of xi^k``; negative orders by conjugation."""
        k = int(k)
        if self.is_atomic:
            if self.weights.size == 0:
                return 0.0 + 0.0j
            return complex(np.sum(self.weights * np.exp(1j * k * self.thetas)))
        if abs(k) > self.moment_order:
            raise ValueError(
                f"moment order {k} exceeds stored order {self.moment_order}")
        return complex(self.moments[k]) if k >= 0 else complex(np.conj(self.moments[-k]))

    def moments_to(self, order: int) -> np.ndarray:
        """Moments ``m_0 .. m_order`` as a complex array."""
        if order < 0:
            return np.zeros(0, dtype=complex)
        if self.is_atomic:
            if self.weights.size == 0:
                return np.zeros(order + 1, dtype=complex)
            ks = np.arange(order + 1)
            return np.exp(1j * np.outer(ks, self.thetas)) @ self.weights.astype(complex)
        if order > self.moment_order:
            raise ValueError(
                f"moment order {order} exceeds stored order {self.moment_order}")
        return self.moments[: order + 1].copy()

    # ------------------------------------------------------------- transforms

    def herglotz_series(self, order: int = DEFAULT_ORDER) -> TruncatedSeries:
        """Taylor series of ``H(z) = integral (1 + xi z)/(1 - xi z)``.

        Equals ``m_0 + 2 sum_{k>=1} m_k z^k``; its real part on the disk is
        non-negative for any non-negative measure.
        """
        m = self.moments_to(order)
        c = 2.0 * m
        c[0] = m[0]
        return TruncatedSeries(c)

    def herglotz_eval(self, z):
        """Evaluate the Herglotz transform at points ``z`` inside the disk.

        Exact for atoms; via the stored truncated moments otherwise.
        """
        z = np.asarray(z, dtype=complex)
        if self.is_atomic:
            if self.weights.size == 0:
                return np.zeros_like(z)
            xi = np.exp(1j * self.thetas)
            zx = np.multiply.outer(z, xi)
            return ((1.0 + zx) / (1.0 - zx)) @ self.weights.astype(complex)
        return self.herglotz_series(self.moment_order)(z)

    def fejer_density(self, grid_size: int, order: int | None = None):
        """Non-negative Fejer-sum density on a uniform angular grid.

        Returns ``(thetas, values)``; the first ``order`` moments of the
        density converge to the measure's as the order grows.  Plotting aid
        only.
        """
        if order is None:
            order = DEFAULT_ORDER if self.is_atomic else self.moment_order
        m = self.moments_to(order)
        taper = 1.0 - np.arange(order + 1) / (order + 1.0)
        thetas = TWO_PI * np.arange(grid_size) / grid_size
        phases = np.exp(-1j * np.outer(thetas, np.arange(1, order + 1)))
        vals = (m[0].real + 2.0 * (phases @ (taper[1:] * m[1:])).real) / TWO_PI
        return thetas, np.maximum(vals, 0.0)

    # ------------------------------------------------------------ operations

    def rotated(self, phi: float) -> "CircleMeasure":
        """Push-forward under ``xi -> e^{i phi} xi``."""
        if self.is_atomic:
            return CircleMeasure(thetas=self.thetas + phi, weights=self.weights.copy())
        ks = np.arange(self.moments.size)
        return CircleMeasure(moments=self.moments * np.exp(1j * ks * phi))

    def scaled(self, c: float) -> "CircleMeasure":
        if self.is_atomic:
            return CircleMeasure(thetas=self.thetas.copy(), weights=self.weights * c)
        return CircleMeasure(moments=self.moments * c)

    def __add__(self, other: "CircleMeasure") -> "CircleMeasure":
        if not isinstance(other, CircleMeasure):
            return NotImplemented
        if self.is_atomic and other.is_atomic:
            return CircleMeasure(
                thetas=np.concatenate([self.thetas, other.thetas]),
                weights=np.concatenate([self.weights, other.weights]),
            )
        orders = [m.moment_order for m in (self, other) if m.moment_order is not None]
        order = min(orders)
        return CircleMeasure(moments=self.moments_to(order) + other.moments_to(order))

    # ------------------------------------------------------------- positivity

    def toeplitz(self, order: int | None = None) -> np.ndarray:
        """Hermitian Toeplitz moment matrix ``[m_{j-k}]``."""
        if order is None:
            order = DEFAULT_ORDER if self.is_atomic else self.moment_order
        m = self.moments_to(order)
        full = np.concatenate([np.conj(m[:0:-1]), m])  # m_{-order} .. m_{order}
        idx = np.arange(order + 1)
        return full[order + (idx[:, None] - idx[None, :])]

    def min_toeplitz_eigenvalue(self, order: int | None = None) -> float:
        return float(np.linalg.eigvalsh(self.toeplitz(order))[0])

    def is_psd(self, tol: float = 1e-10, order: int | None = None) -> bool:
        return self.min_toeplitz_eigenvalue(order) >= -tol

    def nearest_psd(self, preserve_mass: bool = False,
                    max_rounds: int = 100) -> tuple["CircleMeasure", float]:
        """Project a moment-form measure onto the PSD Toeplitz cone.

        Alternates eigenvalue flooring with diagonal averaging until the
        sequence lands inside the cone (one pass of either alone does not).
        With ``preserve_mass`` the result is rescaled to keep the mass, which
        avoids the systematic upward drift flooring would otherwise cause.
        Returns the projected measure and the largest moment adjustment.
        """
        if self.is_atomic:
            return self, 0.0
        order = self.moment_order
        mass = self.moments[0].real
        moments = self.moments.copy()
        idx = np.arange(order + 1)
        offsets = idx[:, None] - idx[None, :]
        for _ in range(max_rounds):
            full = np.concatenate([np.conj(moments[:0:-1]), moments])
            lam, vec = np.linalg.eigh(full[order + offsets])
            if lam[0] >= -1e-13 * max(1.0, lam[-1]):
                break
            fixed = (vec * np.maximum(lam, 0.0)) @ vec.conj().T
            moments = np.array([np.mean(np.diagonal(fixed, offset=-d))
                                for d in range(order + 1)])
            moments[0] = moments[0].real
        if preserve_mass and moments[0].real > 0.0 and mass > 0.0:
            moments = moments * (mass / moments[0].real)
        adjustment = float(np.max(np.abs(moments - self.moments)))
        return CircleMeasure(moments=moments), adjustment

    # ---------------------------------------------------------------- codecs

    def to_json_dict(self) -> dict:
        if self.is_atomic:
            return {"atoms": [{"theta": float(t), "weight": float(w)}
                              for t, w in zip(self.thetas, self.weights)]}
        return {"moments": {
            "mass": float(self.moments[0].real),
            "values": [[float(v.real), float(v.imag)] for v in self.moments[1:]],
        }}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CircleMeasure":
        if not isinstance(data, dict):
            raise ValueError("measure must be a JSON object")
        if "atoms" in data:
            return cls.from_atoms((a["theta"], a["weight"]) for a in data["atoms"])
        if "moments" in data:
            block = data["moments"]
            values = [complex(re, im) for re, im in block.get("values", [])]
            return cls.from_moments(block["mass"], values) if values else \
                cls(moments=np.array([complex(block["mass"])]))
        raise ValueError("measure needs an 'atoms' or 'moments' entry")


def char_distance(a: CircleMeasure, b: CircleMeasure, order: int) -> float:
    """Weighted character distance ``sum_{k<=K} 2^{-k} |m_k(a) - m_k(b)|``.

    A metric on truncated moment data: zero exactly when the masses and the
    first K moments agree.  Used as the weak-convergence proxy everywhere.
    """
    diff = np.abs(a.moments_to(order) - b.moments_to(order))
    return float(np.dot(0.5 ** np.arange(order + 1), diff))
