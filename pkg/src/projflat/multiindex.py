"""Multi-index bookkeeping for monomials ``x**alpha`` and mixed partials ``d^alpha``.

The graded lexicographic enumeration produced by :func:`enumerate_multiindices`
is the canonical row order used by every report file in this package: indices
are sorted by total order first, and within one total order the first axis is
the most significant (``(1, 0)`` precedes ``(0, 1)``).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Iterator


class MultiIndex(tuple):
    """Exponent vector in Z^n_{>=0}.

    A thin tuple subclass, so instances hash and compare like plain tuples
    and can key dictionaries interchangeably with them.  ``+`` is overridden
    to mean componentwise addition (monomial product), not concatenation.
    """

    __slots__ = ()

    def __new__(cls, exponents: Iterable[int]) -> "MultiIndex":
        idx = super().__new__(cls, (int(e) for e in exponents))
        if len(idx) == 0:
            raise ValueError("multi-index needs at least one axis")
        if any(e < 0 for e in idx):
            raise ValueError(f"multi-index entries must be non-negative, got {tuple(idx)}")
        return idx

    @property
    def order(self) -> int:
        """Total order ``|alpha|``; recomputed, never cached."""
        return sum(self)

    @property
    def factorial(self) -> int:
        """``alpha! = prod_i alpha_i!``."""
        return math.prod(math.factorial(e) for e in self)

    def __add__(self, other) -> "MultiIndex":  # type: ignore[override]
        return MultiIndex(a + b for a, b in zip(self, other, strict=True))

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)!r}"


def zero_index(dim: int) -> MultiIndex:
    return MultiIndex((0,) * dim)


def unit_index(dim: int, axis: int) -> MultiIndex:
    """The first-order index e_axis (0-based axis)."""
    if not 0 <= axis < dim:
        raise ValueError(f"axis {axis} out of range for dimension {dim}")
    return MultiIndex(1 if k == axis else 0 for k in range(dim))


def _compositions(total: int, n: int) -> Iterator[tuple[int, ...]]:
    # Descending first entry yields descending-lex order directly.
    if n == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, n - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def enumerate_multiindices(dim: int, max_order: int) -> tuple[MultiIndex, ...]:
    """All multi-indices with ``|alpha| <= max_order`` in graded-lex order.

    Parameters
    ----------
    dim : int
        Number of axes, >= 1.
    max_order : int
        Largest total order included, >= 0.

    Returns
    -------
    tuple of MultiIndex
        Exactly ``C(dim + max_order, dim)`` indices, grouped by increasing
        total order, descending lexicographic within each group.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if max_order < 0:
        raise ValueError(f"max order must be >= 0, got {max_order}")
    out = []
    for total in range(max_order + 1):
        out.extend(MultiIndex(c) for c in _compositions(total, dim))
    return tuple(out)
