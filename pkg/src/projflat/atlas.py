"""Real projective space as homogeneous coordinates with the standard affine
charts, plus the unit-sphere stereographic maps.

Chart indices are 1-based throughout (chart ``i`` of RP^n is the locus
``x_i != 0``, for ``i`` in ``1..n+1``), matching the usual orientation of the
transition formulas.  A coordinate counts as "on the hyperplane at infinity"
only when it is exactly ``0.0``: near-zero values are legal inputs, they are
precisely the punctured-neighborhood regime the flatness verifier probes.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .jets import Jet, recip

__all__ = [
    "NotInChartError",
    "NotInOverlapError",
    "PoleError",
    "ProjectivePoint",
    "AffinePoint",
    "SpherePoint",
    "chart_map",
    "chart_inverse",
    "transition",
    "transition_values",
    "transition_divisor_axis",
    "classify",
    "stereo",
    "stereo_inverse",
]


class NotInChartError(ValueError):
    """The point lies on the hyperplane at infinity of the requested chart."""


class NotInOverlapError(NotInChartError):
    """The point lies outside the overlap of the two requested charts, i.e.
    on the boundary hyperplane where the transition map is singular."""


class PoleError(ValueError):
    """Stereographic projection evaluated at the excluded pole."""


def _check_chart(i: int, n: int) -> None:
    if not 1 <= i <= n + 1:
        raise ValueError(f"chart index {i} out of range 1..{n + 1}")


class ProjectivePoint:
    """Point of RP^n in homogeneous coordinates, stored canonically.

    Canonical form: divide by the coordinate of largest magnitude (so
    ``max |x_k| == 1``), then flip the overall sign so the first nonzero
    coordinate is positive.  This picks one representative per equivalence
    class, including the ``x ~ -x`` identification, without ever dividing by
    a small pivot.  Equality is exact equality of canonical forms.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("homogeneous coordinates must be a 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("homogeneous coordinates must be finite")
        top = np.max(np.abs(arr))
        if top == 0.0:
            raise ValueError("the zero vector is not a projective point")
        arr /= top
        first = arr[np.nonzero(arr)[0][0]]
        if first < 0:
            arr = -arr
        arr.setflags(write=False)
        self.coords = arr

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.coords.shape == other.coords.shape and bool(
            np.all(self.coords == other.coords)
        )

    def __hash__(self):
        return hash(self.coords.tobytes())

    def isclose(self, other: "ProjectivePoint", tol: float = 1e-12) -> bool:
        return self.coords.shape == other.coords.shape and bool(
            np.max(np.abs(self.coords - other.coords)) <= tol
        )

    def __repr__(self):
        return f"ProjectivePoint({self.coords.tolist()!r})"


@dataclass(frozen=True)
class AffinePoint:
    """Coordinates of a point in one affine chart (1-based chart index)."""

    chart: int
    coords: tuple[float, ...]

    def __post_init__(self):
        n = len(self.coords)
        if n < 1:
            raise ValueError("affine point needs at least one coordinate")
        _check_chart(self.chart, n)
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"affine coordinates must be finite, got {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)


def chart_map(i: int, point: ProjectivePoint) -> AffinePoint:
    """Chart map of chart ``i``: divide by ``x_i`` and delete slot ``i``.

    Scale-invariant by construction (canonical forms are scale-free).
    Raises :class:`NotInChartError` when the canonical ``x_i`` is exactly 0.
    """
    _check_chart(i, point.dim)
    x = point.coords
    pivot = x[i - 1]
    if pivot == 0.0:
        raise NotInChartError(f"coordinate {i} is zero: point is at infinity of chart {i}")
    vals = np.delete(x, i - 1) / pivot
    return AffinePoint(i, tuple(float(v) for v in vals))


def chart_inverse(i: int, point: AffinePoint) -> ProjectivePoint:
    """Inverse chart map: insert 1 in slot ``i`` and read homogeneously."""
    if point.chart != i:
        raise ValueError(f"point carries chart {point.chart}, expected {i}")
    coords = list(point.coords)
    coords.insert(i - 1, 1.0)
    return ProjectivePoint(coords)


def transition_divisor_axis(i: int, j: int) -> int:
    """0-based index, among chart-``j`` coordinates, of the coordinate the
    transition into chart ``i`` divides by.  Its zero locus is chart ``i``'s
    hyperplane at infinity seen in chart ``j``."""
    if i == j:
        raise ValueError("transition between a chart and itself has no divisor")
    return i - 1 if i < j else i - 2


def transition_values(i: int, j: int, values: list):
    """Transition map chart ``j`` -> chart ``i`` on raw coordinate values.

    ``values`` holds the n chart-``j`` coordinates as floats or as
    :class:`~projflat.jets.Jet` values (jets push the full truncated Taylor
    expansion through the map).  Implemented as the composition of the
    homogeneous embedding of chart ``j`` with the chart-``i`` map, which is
    the entire content of the closed-form quotient formulas.
    """
    n = len(values)
    _check_chart(i, n)
    _check_chart(j, n)
    hom = list(values)
    hom.insert(j - 1, 1.0)
    divisor = hom[i - 1]
    if isinstance(divisor, Jet):
        if np.any(divisor.value == 0.0):
            raise NotInOverlapError(
                f"coordinate in slot {i} is zero: on the hyperplane at infinity of chart {i}"
            )
        inv = recip(divisor)
        return [h * inv for k, h in enumerate(hom) if k != i - 1]
    if divisor == 0.0:
        raise NotInOverlapError(
            f"coordinate in slot {i} is zero: on the hyperplane at infinity of chart {i}"
        )
    return [h / divisor for k, h in enumerate(hom) if k != i - 1]


def transition(i: int, j: int, point: AffinePoint) -> AffinePoint:
    """Transition map between charts as an :class:`AffinePoint` operation."""
    if point.chart != j:
        raise ValueError(f"point carries chart {point.chart}, expected {j}")
    vals = transition_values(i, j, list(point.coords))
    return AffinePoint(i, tuple(float(v) for v in vals))


def classify(point: ProjectivePoint, i: int):
    """Decompose RP^n relative to chart ``i``: its affine part and its copy
    of RP^(n-1) at infinity.

    Returns the :class:`AffinePoint` when the point lies in chart ``i``,
    otherwise the :class:`ProjectivePoint` of dimension n-1 obtained by
    deleting coordinate ``i``.  Exactly one branch applies to every point.
    """
    _check_chart(i, point.dim)
    if point.coords[i - 1] != 0.0:
        return chart_map(i, point)
    return ProjectivePoint(np.delete(point.coords, i - 1))


@dataclass(frozen=True)
class SpherePoint:
    """Point of the unit sphere S^n in R^(n+1); the first coordinate is the
    pole axis used by the stereographic maps."""

    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) < 2:
            raise ValueError("sphere point needs at least two coordinates")
        norm_sq = math.fsum(c * c for c in self.coords)
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(f"not on the unit sphere: |x|^2 = {norm_sq!r}")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1


def stereo(point: SpherePoint) -> tuple[float, ...]:
    """Stereographic projection from the north pole (1, 0, ..., 0):
    ``(y, x_1, ..., x_n) -> (x_1/(1-y), ..., x_n/(1-y))``."""
    y = point.coords[0]
    if y == 1.0:
        raise PoleError("stereographic projection undefined at the north pole")
    return tuple(c / (1.0 - y) for c in point.coords[1:])


def stereo_inverse(x) -> SpherePoint:
    """Inverse stereographic projection of a point of R^n.

    With ``d = |x|^2`` the image is ``((d-1)/(d+1), 2 x_1/(d+1), ...,
    2 x_n/(d+1))``; the origin maps to the south pole exactly.
    """
    xs = [float(v) for v in x]
    if len(xs) < 1:
        raise ValueError("need at least one coordinate")
    d = math.fsum(v * v for v in xs)
    y = (d - 1.0) / (d + 1.0)
    return SpherePoint((y, *(2.0 * v / (d + 1.0) for v in xs)))
