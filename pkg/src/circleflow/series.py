"""Truncated complex power-series arithmetic.

Every analytic-function manipulation in this package (moment generating
functions, eta- and Sigma-transforms, Herglotz integrals, Loewner chains) is
carried out on Taylor polynomials truncated at a fixed order ``N``.  Because
operations never read or write coefficients beyond index ``N``, a product or
composition of degree-``N`` truncations equals the truncation of the exact
result, so all series identities used downstream hold exactly up to roundoff.
"""

from __future__ import annotations

import numpy as np

#: default truncation order used throughout the package
DEFAULT_ORDER = 32

# constant terms below this magnitude count as vanishing where a zero
# constant term is required (composition inner, reversion input)
_ZERO_TOL = 1e-9


def _div_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of a/b to the common order; b[0] must be nonzero."""
    if abs(b[0]) == 0.0:
        raise ZeroDivisionError("series division by a series vanishing at 0")
    n = a.size
    q = np.empty(n, dtype=complex)
    q[0] = a[0] / b[0]
    for k in range(1, n):
        q[k] = (a[k] - np.dot(b[1 : k + 1], q[k - 1 :: -1][:k])) / b[0]
    return q


class TruncatedSeries:
    """Degree-N polynomial proxy ``c_0 + c_1 z + ... + c_N z^N``.

    Immutable value object; arithmetic returns new instances.  Binary
    operations require both operands to have the same order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("coefficients must be a 1-d sequence of length >= 2")
        c.flags.writeable = False
        self.coeffs = c

    # ---------------------------------------------------------------- basics

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls.constant(0.0, order)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """The series ``z``."""
        c = np.zeros(order + 1, dtype=complex)
        c[1] = 1.0
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def _peer(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise ValueError(
                f"series order mismatch: {self.order} vs {other.order}"
            )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        head = ", ".join(f"{c:.6g}" for c in self.coeffs[:4])
        tail = ", ..." if self.order > 3 else ""
        return f"TruncatedSeries([{head}{tail}], order={self.order})"

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._peer(other)
            return TruncatedSeries(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._peer(other)
            return TruncatedSeries(
                np.convolve(self.coeffs, other.coeffs)[: self.order + 1]
            )
        return TruncatedSeries(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            self._peer(other)
            return TruncatedSeries(_div_coeffs(self.coeffs, other.coeffs))
        return TruncatedSeries(self.coeffs / other)

    # ---------------------------------------------------------- composition

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """Taylor coefficients of ``self(inner(z))`` to the common order.

        ``inner`` must vanish at 0, otherwise the truncated composition is
        not well defined.  Evaluated by the Horner scheme in the series ring.
        """
        self._peer(inner)
        if abs(inner.coeffs[0]) > _ZERO_TOL:
            raise ValueError("inner series must have vanishing constant term")
        acc = TruncatedSeries.constant(self.coeffs[-1], self.order)
        for k in range(self.order - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse g with ``self(g(z)) = z + O(z^{N+1})``.

        Requires a vanishing constant term and a nonzero linear one.  Newton
        iteration on the series; the agreement order doubles per step, so the
        result is exact at the truncation order (no tolerance parameter).
        """
        c = self.coeffs
        if abs(c[0]) > _ZERO_TOL:
            raise ValueError("reversion requires a vanishing constant term")
        if abs(c[1]) < 1e-150:
            raise ValueError("reversion requires a nonzero linear coefficient")
        order = self.order
        ident = TruncatedSeries.identity(order)
        g = TruncatedSeries(ident.coeffs / c[1])
        deriv = self.derivative()
        for _ in range(max(1, int(np.ceil(np.log2(order + 1))))):
            g = g - (self.compose(g) - ident) / deriv.compose(g)
        return g

    # ------------------------------------------------------------- exp / log

    def exp(self) -> "TruncatedSeries":
        """Series exponential, exact term by term at the truncation order."""
        n = self.order
        e = np.zeros(n + 1, dtype=complex)
        e[0] = np.exp(self.coeffs[0])
        jf = self.coeffs * np.arange(n + 1)  # j * f_j
        # recurrence k*e_k = sum_j (j f_j) e_{k-j}, from E' = F' E
        for k in range(1, n + 1):
            e[k] = np.dot(jf[1 : k + 1], e[k - 1 :: -1][:k]) / k
        return TruncatedSeries(e)

    def log(self) -> "TruncatedSeries":
        """Series logarithm, principal branch of log at the constant term."""
        c0 = self.coeffs[0]
        if abs(c0) == 0.0:
            raise ValueError("log requires a nonzero constant term")
        n = self.order
        u = self.coeffs / c0
        g = np.zeros(n + 1, dtype=complex)
        g[0] = np.log(c0)
        for k in range(1, n + 1):
            acc = u[k]
            if k > 1:
                jg = np.arange(1, k) * g[1:k]
                acc -= np.dot(jg, u[k - 1 : 0 : -1]) / k
            g[k] = acc
        return TruncatedSeries(g)

    # -------------------------------------------------------------- calculus

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative, zero-padded at the top to keep the order."""
        c = np.zeros(self.order + 1, dtype=complex)
        c[:-1] = self.coeffs[1:] * np.arange(1, self.order + 1)
        return TruncatedSeries(c)

    def shifted(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by ``z^k``, dropping coefficients pushed past the order."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        c = np.zeros(self.order + 1, dtype=complex)
        if k <= self.order:
            c[k:] = self.coeffs[: self.order + 1 - k]
        return TruncatedSeries(c)

    def __call__(self, z):
        """Evaluate the polynomial at ``z`` (scalar or array) by Horner."""
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)
