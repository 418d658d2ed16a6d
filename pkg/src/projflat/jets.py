"""Truncated multivariate Taylor arithmetic (jets).

A :class:`Jet` holds the Taylor coefficients of a smooth function at a point,
up to a fixed truncation order ``K``:

    coeff(alpha) = (d^alpha f)(x0) / alpha!      for every |alpha| <= K.

Storage is dense over the graded-lex enumeration of multi-indices; a missing
coefficient never means zero, zeros are stored explicitly.  The divided
(Taylor) normalization keeps multiplication a plain truncated convolution;
factorials are applied only by :func:`extract_partial`.

Coefficient arrays may carry trailing batch dimensions, so one jet value can
represent the expansions of the same expression at many base points at once
(shape ``(ncoeff,) + batch``).  All operations are pure; jets are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .multiindex import MultiIndex, enumerate_multiindices

__all__ = [
    "Jet",
    "SingularPointError",
    "jet_space",
    "constant_jet",
    "seed_jet",
    "extract_partial",
    "exp",
    "sin",
    "cos",
    "recip",
    "powi",
]


class SingularPointError(ArithmeticError):
    """Reciprocal of a jet whose value (constant term) is exactly zero."""


class _JetSpace:
    """Shared tables for all jets of one (dim, order): index maps and the
    truncated-product gather/scatter arrays."""

    def __init__(self, dim: int, order: int):
        self.dim = dim
        self.order = order
        self.indices = enumerate_multiindices(dim, order)
        self.position = {alpha: pos for pos, alpha in enumerate(self.indices)}
        self.ncoeff = len(self.indices)
        self.orders = np.array([alpha.order for alpha in self.indices])
        self.factorials = np.array([float(alpha.factorial) for alpha in self.indices])

        by_order: list[list[int]] = [[] for _ in range(order + 1)]
        for pos, alpha in enumerate(self.indices):
            by_order[alpha.order].append(pos)
        left, right, target = [], [], []
        for oa in range(order + 1):
            for ob in range(order + 1 - oa):
                for pa in by_order[oa]:
                    ia = self.indices[pa]
                    for pb in by_order[ob]:
                        left.append(pa)
                        right.append(pb)
                        target.append(self.position[ia + self.indices[pb]])
        target_arr = np.array(target)
        by_target = np.argsort(target_arr, kind="stable")
        self._left = np.array(left)[by_target]
        self._right = np.array(right)[by_target]
        # every position occurs as a target (pair with the zero index), so
        # the reduceat group starts cover 0..ncoeff-1
        self._starts = np.searchsorted(target_arr[by_target], np.arange(self.ncoeff))

    def mul_coeffs(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = a[self._left] * b[self._right]
        return np.add.reduceat(prod, self._starts, axis=0)


@lru_cache(maxsize=None)
def jet_space(dim: int, order: int) -> _JetSpace:
    if dim < 1:
        raise ValueError(f"jet dimension must be >= 1, got {dim}")
    if order < 0:
        raise ValueError(f"jet order must be >= 0, got {order}")
    return _JetSpace(dim, order)


def _batched(coeffs: np.ndarray, ncoeff: int, batch: tuple[int, ...]) -> np.ndarray:
    current = coeffs.shape[1:]
    if current == batch:
        return coeffs
    expanded = coeffs.reshape((ncoeff,) + (1,) * (len(batch) - len(current)) + current)
    return np.broadcast_to(expanded, (ncoeff,) + batch)


class Jet:
    """Truncated Taylor expansion of one scalar quantity.

    Supports ``+ - * /`` against other jets of the same (dim, order) and
    against plain scalars or batch arrays; ``**`` takes integer exponents.
    Analytic functions live at module level (:func:`exp`, :func:`sin`,
    :func:`cos`, :func:`recip`).
    """

    __slots__ = ("space", "coeffs")
    __array_ufunc__ = None  # keep numpy scalars from hijacking arithmetic

    def __init__(self, space: _JetSpace, coeffs: np.ndarray):
        self.space = space
        self.coeffs = coeffs

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def value(self):
        """Constant term, i.e. the function value at the base point."""
        return self.coeffs[0]

    def coeff(self, alpha) -> np.ndarray:
        """Taylor coefficient at ``alpha`` ((d^alpha f)(x0)/alpha!)."""
        alpha = MultiIndex(alpha)
        pos = self.space.position.get(alpha)
        if pos is None:
            raise ValueError(
                f"|alpha|={alpha.order} exceeds jet order {self.order}"
            )
        return self.coeffs[pos]

    def nilpotent_part(self) -> "Jet":
        out = self.coeffs.copy()
        out[0] = 0.0
        return Jet(self.space, out)

    def _check_compatible(self, other: "Jet") -> None:
        if other.space is not self.space:
            if (other.dim, other.order) != (self.dim, self.order):
                raise ValueError(
                    f"jet mismatch: ({self.dim}, {self.order}) vs "
                    f"({other.dim}, {other.order})"
                )

    def _pair(self, other: "Jet") -> tuple[np.ndarray, np.ndarray]:
        self._check_compatible(other)
        batch = np.broadcast_shapes(self.batch_shape, other.batch_shape)
        n = self.space.ncoeff
        return _batched(self.coeffs, n, batch), _batched(other.coeffs, n, batch)

    def _scalar_pair(self, value) -> tuple[np.ndarray, np.ndarray]:
        value = np.asarray(value, dtype=float)
        batch = np.broadcast_shapes(self.batch_shape, value.shape)
        coeffs = _batched(self.coeffs, self.space.ncoeff, batch)
        return coeffs, np.broadcast_to(value, batch)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._pair(other)
            return Jet(self.space, a + b)
        a, v = self._scalar_pair(other)
        out = a.copy()
        out[0] = out[0] + v
        return Jet(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self._pair(other)
            return Jet(self.space, self.space.mul_coeffs(a, b))
        a, v = self._scalar_pair(other)
        return Jet(self.space, a * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * recip(other)
        a, v = self._scalar_pair(other)
        return Jet(self.space, a / v)

    def __rtruediv__(self, other):
        return recip(self) * other

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        return powi(self, int(exponent))

    def __repr__(self) -> str:
        return (
            f"Jet(dim={self.dim}, order={self.order}, "
            f"batch={self.batch_shape}, value={self.value!r})"
        )


def constant_jet(value, dim: int, order: int) -> Jet:
    """Jet of a constant: value in slot zero, zeros elsewhere."""
    space = jet_space(dim, order)
    value = np.asarray(value, dtype=float)
    coeffs = np.zeros((space.ncoeff,) + value.shape)
    coeffs[0] = value
    return Jet(space, coeffs)


def seed_jet(point: Sequence, order: int) -> list[Jet]:
    """Coordinate jets at ``point``: the i-th jet is the expansion of the i-th
    coordinate function (constant term ``point[i]``, unit first-order
    coefficient on axis i, zero elsewhere).

    ``point`` entries may be scalars or equally-shaped arrays; array entries
    produce batched jets.  Requires ``order >= 1`` (first-order slots must
    exist for the unit coefficients).
    """
    if order < 1:
        raise ValueError(f"seed jets need order >= 1, got {order}")
    dim = len(point)
    space = jet_space(dim, order)
    values = [np.asarray(v, dtype=float) for v in point]
    batch = np.broadcast_shapes(*(v.shape for v in values)) if values else ()
    jets = []
    for axis in range(dim):
        coeffs = np.zeros((space.ncoeff,) + batch)
        coeffs[0] = values[axis]
        # first-order indices sit right after the zero index, axis-major
        coeffs[1 + axis] = 1.0
        jets.append(Jet(space, coeffs))
    return jets


def extract_partial(jet: Jet, alpha) -> np.ndarray:
    """(d^alpha f)(x0) = alpha! * coeff(alpha); errors if |alpha| > order."""
    alpha = MultiIndex(alpha)
    return alpha.factorial * jet.coeff(alpha)


def _horner_nilpotent(jet: Jet, series: list) -> Jet:
    """Evaluate ``sum_k series[k] * w**k`` with ``w`` the nilpotent part."""
    w = jet.nilpotent_part()
    acc = constant_jet(np.broadcast_to(np.asarray(series[-1], float), w.batch_shape),
                       jet.dim, jet.order)
    for d in reversed(series[:-1]):
        acc = acc * w
        out = acc.coeffs
        out[0] = out[0] + d
    return acc


def exp(x):
    """Exponential; jets via the Taylor recurrence on the nilpotent part,
    scalars and arrays via numpy."""
    if not isinstance(x, Jet):
        return np.exp(x)
    c = np.exp(x.value)
    series = [c / math.factorial(k) for k in range(x.order + 1)]
    return _horner_nilpotent(x, series)


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    s, c = np.sin(x.value), np.cos(x.value)
    cycle = (s, c, -s, -c)
    series = [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)]
    return _horner_nilpotent(x, series)


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    s, c = np.sin(x.value), np.cos(x.value)
    cycle = (c, -s, -c, s)
    series = [cycle[k % 4] / math.factorial(k) for k in range(x.order + 1)]
    return _horner_nilpotent(x, series)


def recip(x):
    """Multiplicative inverse.  Raises :class:`SingularPointError` when the
    jet's constant term is exactly zero; this is evaluation at a point the
    expression is singular at (for chart transitions, the hyperplane at
    infinity), and callers are expected to treat it as a boundary."""
    if not isinstance(x, Jet):
        return 1.0 / x
    c = x.value
    if np.any(c == 0.0):
        raise SingularPointError("reciprocal of a jet with zero constant term")
    inv = 1.0 / c
    series = [inv * (-inv) ** k for k in range(x.order + 1)]
    return _horner_nilpotent(x, series)


def powi(x, k: int):
    """Integer power by binary exponentiation; negative powers via recip."""
    if not isinstance(x, Jet):
        return np.asarray(x, dtype=float) ** k
    if k < 0:
        return recip(powi(x, -k))
    if k == 0:
        return constant_jet(np.ones(x.batch_shape), x.dim, x.order)
    result = None
    base = x
    while True:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if not k:
            return result
        base = base * base
