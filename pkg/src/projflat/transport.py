"""Transport of partial derivatives across affine charts.

Writing ``s = transition(i, j, t)`` for the map from chart ``j`` into chart
``i``, a function has two representatives ``f`` (chart ``i``) and
``g = f o transition(i, j, .)`` (chart ``j``).  This module computes

* the first-order transport matrix ``M(t)`` with ``grad f(s) = M(t) grad g(t)``,
* full tables of the mixed partials ``(d^alpha g)(t)`` to any order, by
  pushing coordinate jets through the transition map (the exact chain rule,
  no symbolic expansion needed), and
* the weighted derivatives ``t_d^{-p} (d^alpha g)(t)`` that certify flatness
  at the hyperplane ``t_d = 0``.

For the chart pair (1, 2) the matrix has the closed form

    first row   (-t1^2, -t1*t2, ..., -t1*tn)
    elsewhere   t1 on the diagonal, zero off it

and that is emitted symbolically.  Other chart pairs are not triangular; their
matrix is the inverse-transpose of the transition Jacobian, evaluated through
order-1 jets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atlas import AffinePoint, NotInOverlapError, transition_divisor_axis, transition_values
from .fields import ScalarField
from .jets import Jet, constant_jet, extract_partial, seed_jet
from .multiindex import MultiIndex, enumerate_multiindices, unit_index

__all__ = [
    "TransportMatrix",
    "DerivativeTable",
    "first_order_matrix",
    "pushforward_jet",
    "pushforward_derivatives",
    "pushforward_field",
    "weighted_derivative",
]


@dataclass(frozen=True, eq=False)
class TransportMatrix:
    """Gradient transport ``grad f(s) = entries @ grad g(t)`` between the
    chart-``chart_i`` and chart-``chart_j`` representatives, evaluated at the
    chart-``chart_j`` point ``point``."""

    chart_i: int
    chart_j: int
    point: AffinePoint
    entries: np.ndarray


def _closed_form_12(t: tuple[float, ...]) -> np.ndarray:
    n = len(t)
    t1 = t[0]
    m = np.zeros((n, n))
    for k in range(n):
        m[0, k] = -(t1 * t[k])
    for k in range(1, n):
        m[k, k] = t1
    return m


def first_order_matrix(i: int, j: int, point: AffinePoint) -> TransportMatrix:
    """Transport matrix for the pair (i, j) at a chart-``j`` point.

    Orientation: ``grad f(s) = M(t) grad g(t)`` with ``s = transition(i,j,t)``.
    Raises :class:`~projflat.atlas.NotInOverlapError` off the chart overlap.
    """
    if point.chart != j:
        raise ValueError(f"point carries chart {point.chart}, expected {j}")
    n = point.dim
    axis = transition_divisor_axis(i, j)
    if point.coords[axis] == 0.0:
        raise NotInOverlapError(
            f"point is on the hyperplane at infinity of chart {i}"
        )
    if (i, j) == (1, 2):
        return TransportMatrix(i, j, point, _closed_form_12(point.coords))
    jets = seed_jet(point.coords, 1)
    s_jets = transition_values(i, j, jets)
    jac = np.empty((n, n))
    for row, s in enumerate(s_jets):
        for col in range(n):
            jac[row, col] = extract_partial(s, unit_index(n, col))
    return TransportMatrix(i, j, point, np.linalg.inv(jac).T)


@dataclass(frozen=True)
class DerivativeTable:
    """Mixed partials ``(d^alpha g)(point)`` for every ``|alpha| <= order``,
    keyed by multi-index; the zero index holds ``g(point)`` itself."""

    point: AffinePoint
    order: int
    values: dict[MultiIndex, float]

    def partial(self, alpha) -> float:
        alpha = MultiIndex(alpha)
        if alpha.order > self.order:
            raise ValueError(f"|alpha|={alpha.order} exceeds table order {self.order}")
        return self.values[alpha]


def pushforward_jet(f: ScalarField, i: int, j: int, coords, order: int) -> Jet:
    """Jet of ``g = f o transition(i, j, .)`` at chart-``j`` coordinates.

    ``coords`` entries may be arrays of a common shape; the jet is then
    batched over that shape.  ``order`` must be >= 1.
    """
    if f.dim != len(coords):
        raise ValueError(f"field has dimension {f.dim}, point has {len(coords)}")
    jets = seed_jet(coords, order)
    out = f.func(transition_values(i, j, jets))
    if not isinstance(out, Jet):  # constant evaluators may return a bare value
        batch = np.broadcast_shapes(*(np.shape(v) for v in coords))
        out = constant_jet(np.broadcast_to(np.asarray(out, float), batch), f.dim, order)
    return out


def pushforward_derivatives(
    f: ScalarField, i: int, j: int, point: AffinePoint, order: int
) -> DerivativeTable:
    """Table of ``(d^alpha g)(t)``, ``|alpha| <= order``, for the chart-``j``
    representative of the chart-``i`` field ``f``.

    Computed by seeding coordinate jets at ``t``, pushing them through the
    transition map, and evaluating ``f`` on the results, which realizes the
    chain rule exactly to the requested order.
    """
    if point.chart != j:
        raise ValueError(f"point carries chart {point.chart}, expected {j}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    n = point.dim
    if order == 0:
        s = transition_values(i, j, list(point.coords))
        value = float(f.func(s))
        return DerivativeTable(point, 0, {MultiIndex((0,) * n): value})
    out = pushforward_jet(f, i, j, point.coords, order)
    values = {
        alpha: float(extract_partial(out, alpha))
        for alpha in enumerate_multiindices(n, order)
    }
    return DerivativeTable(point, order, values)


def pushforward_field(f: ScalarField, i: int, j: int) -> ScalarField:
    """The chart-``j`` representative ``g = f o transition(i, j, .)`` as a
    field in its own right (defined on the chart overlap)."""
    def evaluator(xs):
        return f.func(transition_values(i, j, list(xs)))

    name = f"{f.name or 'field'}@chart{j}"
    return ScalarField(f.dim, evaluator, name)


def weighted_derivative(table: DerivativeTable, p: int, alpha, axis: int = 0) -> float:
    """``t_axis^{-p} * (d^alpha g)(t)`` from a derivative table.

    ``axis`` selects the weighting coordinate (0-based); the default first
    coordinate matches the usual orientation where chart 1 is the reference.
    Raises :class:`~projflat.atlas.NotInOverlapError` when the base point lies
    on the boundary ``t_axis = 0``.
    """
    if p < 0:
        raise ValueError(f"weight exponent must be >= 0, got {p}")
    t = table.point.coords[axis]
    if t == 0.0:
        raise NotInOverlapError("base point lies on the boundary hyperplane")
    return table.partial(alpha) / t**p
