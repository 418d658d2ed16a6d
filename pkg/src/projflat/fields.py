"""Real-valued functions on R^n with point and jet evaluation, and the
built-in corpus of rapid-decay examples and counterexamples.

A :class:`ScalarField` wraps an evaluator written against the generic
arithmetic of :mod:`projflat.jets` (``+ - * /`` plus ``exp``/``sin``/``cos``/
``recip``/``powi``), so the same code path produces plain values, vectorized
grid values, and truncated Taylor expansions.  Point evaluation is exactly
order-0 jet evaluation: both run the identical evaluator on the identical
floating-point operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jets import Jet, constant_jet, exp, seed_jet, sin

__all__ = [
    "ScalarField",
    "CorpusEntry",
    "SCHWARTZ",
    "NOT_SCHWARTZ",
    "builtin_corpus",
    "corpus_entry",
    "corpus_names",
]

SCHWARTZ = "schwartz"
NOT_SCHWARTZ = "not-schwartz"


@dataclass(frozen=True)
class ScalarField:
    """An evaluatable function R^n -> R.

    Parameters
    ----------
    dim : int
        Number of input coordinates.
    func : callable
        Maps a sequence of ``dim`` inputs (floats, equally-shaped arrays, or
        jets) to the corresponding output.  Must be deterministic: identical
        inputs produce identical output bits.
    name : str
        Optional identifier used in reports.
    """

    dim: int
    func: Callable[[Sequence], object]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"field dimension must be >= 1, got {self.dim}")

    def _check_point(self, x: Sequence) -> None:
        if len(x) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(x)}")

    def eval(self, x: Sequence) -> float:
        """Value at a point."""
        self._check_point(x)
        return float(self.func([float(v) for v in x]))

    __call__ = eval

    def eval_grid(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Values over a batch of points given as per-axis arrays."""
        self._check_point(columns)
        out = self.func([np.asarray(c, dtype=float) for c in columns])
        return np.asarray(out, dtype=float)

    def eval_jet(self, x: Sequence, order: int) -> Jet:
        """Jet at ``x`` to the given truncation order.

        Entries of ``x`` may be arrays (of one common shape) to expand around
        many base points at once; the result then carries that batch shape.
        """
        self._check_point(x)
        if order < 0:
            raise ValueError(f"jet order must be >= 0, got {order}")
        if order == 0:
            vals = self.func([np.asarray(v, dtype=float) for v in x])
            return constant_jet(vals, self.dim, 0)
        out = self.func(seed_jet(x, order))
        if not isinstance(out, Jet):  # constant evaluators may return a bare value
            batch = np.broadcast_shapes(*(np.shape(v) for v in x))
            out = constant_jet(np.broadcast_to(np.asarray(out, float), batch),
                               self.dim, order)
        return out

    @staticmethod
    def constant(dim: int, value: float, name: str = "") -> "ScalarField":
        v = float(value)
        return ScalarField(dim, lambda xs: v + 0.0 * xs[0], name or f"constant_{value}")


@dataclass(frozen=True)
class CorpusEntry:
    """A named field together with its ground-truth decay class."""

    name: str
    field: ScalarField
    expected_class: str

    def __post_init__(self):
        if self.expected_class not in (SCHWARTZ, NOT_SCHWARTZ):
            raise ValueError(f"unknown class {self.expected_class!r}")


def _sum_squares(xs):
    total = 0.0
    for v in xs:
        total = total + v * v
    return total


def _gaussian(xs):
    return exp(-_sum_squares(xs))


def _poly_gaussian(xs):
    return xs[0] * exp(-_sum_squares(xs))


def _oscillator(xs):
    # e^{-x1^2} sin(e^{x1^2}), damped by a Gaussian in the remaining axes so
    # the decay failure stays isolated to the first coordinate.
    u = xs[0] * xs[0]
    head = exp(-u) * sin(exp(u))
    if len(xs) == 1:
        return head
    return head * exp(-_sum_squares(xs[1:]))


def _runge(xs):
    return 1.0 / (1.0 + _sum_squares(xs))


def _polynomial(xs):
    return 1.0 + xs[0] * xs[0]


_CORPUS = (
    ("gaussian_nd", _gaussian, SCHWARTZ),
    ("poly_gaussian", _poly_gaussian, SCHWARTZ),
    ("oscillator", _oscillator, NOT_SCHWARTZ),
    ("runge", _runge, NOT_SCHWARTZ),
    ("polynomial", _polynomial, NOT_SCHWARTZ),
)


def builtin_corpus(dim: int) -> tuple[CorpusEntry, ...]:
    """The built-in example corpus instantiated in ``dim`` variables.

    Contains the squared-exponential bump ``e^{-|x|^2}`` and its first-moment
    variant (rapid decay), the bounded oscillator ``e^{-x1^2} sin(e^{x1^2})``
    whose first derivative grows linearly, the slowly-decaying rational bump
    ``1/(1+|x|^2)``, and the non-decaying ``1 + x1^2``.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return tuple(
        CorpusEntry(name, ScalarField(dim, func, name), cls)
        for name, func, cls in _CORPUS
    )


def corpus_names() -> tuple[str, ...]:
    return tuple(name for name, _, _ in _CORPUS)


def corpus_entry(name: str, dim: int) -> CorpusEntry:
    """Look up one corpus entry by name; raises ``KeyError`` for unknown names."""
    for entry in builtin_corpus(dim):
        if entry.name == name:
            return entry
    raise KeyError(f"unknown corpus function {name!r}; know {corpus_names()}")
