"""Quasi-pseudometric spaces: asymmetric distances, conjugates, symmetrization.

A quasi-pseudometric d on a carrier X satisfies d(x, x) = 0 and the
triangle inequality, but is not required to be symmetric.  Two carrier
kinds are supported: closed real intervals (points are floats) and finite
sets (points are integer indices into a dense distance matrix).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

Point = Union[int, float]

DEFAULT_AXIOM_SLACK = 1e-12
DEFAULT_GRID_POINTS = 21


class DomainError(ValueError):
    """A point does not belong to the space's carrier."""


class UnsupportedError(RuntimeError):
    """Requested operation needs a finite carrier."""


@dataclass(frozen=True)
class IntervalCarrier:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class FiniteCarrier:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("finite carrier needs at least one point")


Carrier = Union[IntervalCarrier, FiniteCarrier]

# Containment grace for interval carriers: map images may overshoot an
# endpoint by rounding noise and must not raise DomainError for that.
_CONTAINS_EPS = 1e-9


@dataclass(frozen=True)
class BallQuery:
    center: Point
    radius: float
    kind: str = "open"  # "open" | "closed"

    def __post_init__(self):
        if self.kind not in ("open", "closed"):
            raise ValueError(f"unknown ball kind {self.kind!r}")
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")
        if self.kind == "open" and self.radius == 0:
            raise ValueError("open ball requires radius > 0")


@dataclass(frozen=True, eq=False)
class QPSpace:
    """A carrier plus an evaluable asymmetric distance.

    ``dist_fn`` is the raw evaluator; use :meth:`dist` for the checked
    entry point.  ``matrix`` is set for finite spaces (row-major, so
    ``matrix[i, j] = d(i, j)``) and gives exhaustive scans O(1) lookup.
    ``cross_fn``, when present, vectorizes distances over point arrays.
    """

    carrier: Carrier
    dist_fn: Callable[[Point, Point], float]
    name: str = "space"
    matrix: Optional[np.ndarray] = None
    cross_fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    # -- carrier ------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return isinstance(self.carrier, FiniteCarrier)

    def contains(self, x: Point) -> bool:
        if isinstance(self.carrier, FiniteCarrier):
            return (
                isinstance(x, (int, np.integer))
                and not isinstance(x, bool)
                and 0 <= int(x) < self.carrier.size
            )
        if not isinstance(x, (int, float, np.floating, np.integer)):
            return False
        xf = float(x)
        if not math.isfinite(xf):
            return False
        return self.carrier.lo - _CONTAINS_EPS <= xf <= self.carrier.hi + _CONTAINS_EPS

    def require(self, x: Point) -> Point:
        if not self.contains(x):
            raise DomainError(f"point {x!r} is not in the carrier of {self.name}")
        return x

    def points(self) -> list[Point]:
        """All carrier points; finite spaces only."""
        if not self.is_finite:
            raise UnsupportedError("points() needs a finite carrier")
        return list(range(self.carrier.size))

    def grid(self, k: int = DEFAULT_GRID_POINTS) -> list[Point]:
        """Uniform sample: all points (finite) or k grid points (interval)."""
        if self.is_finite:
            return self.points()
        return [float(v) for v in np.linspace(self.carrier.lo, self.carrier.hi, k)]

    # -- distances ----------------------------------------------------

    def dist(self, x: Point, y: Point) -> float:
        self.require(x)
        self.require(y)
        return float(self.dist_fn(x, y))

    def cross(self, left: Sequence[Point], right: Sequence[Point]) -> np.ndarray:
        """Matrix of d(left[i], right[j]) without per-pair domain checks."""
        if self.matrix is not None:
            li = np.asarray(left, dtype=int)
            ri = np.asarray(right, dtype=int)
            return self.matrix[np.ix_(li, ri)]
        if self.cross_fn is not None:
            la = np.asarray(left, dtype=float)
            ra = np.asarray(right, dtype=float)
            return np.asarray(self.cross_fn(la, ra), dtype=float)
        return np.array([[float(self.dist_fn(a, b)) for b in right] for a in left])

    def pairwise(self, points: Sequence[Point]) -> np.ndarray:
        return self.cross(points, points)

    # -- derived spaces -----------------------------------------------

    def conjugate(self) -> "QPSpace":
        """Same carrier with the argument order reversed pointwise."""
        base = self.dist_fn
        cross = None
        if self.matrix is None and self.cross_fn is not None:
            inner = self.cross_fn
            cross = lambda a, b: np.asarray(inner(b, a)).T
        return QPSpace(
            carrier=self.carrier,
            dist_fn=lambda x, y: base(y, x),
            name=f"conj({self.name})",
            matrix=None if self.matrix is None else np.ascontiguousarray(self.matrix.T),
            cross_fn=cross,
        )

    def sup_metric(self) -> "QPSpace":
        """Pointwise max of the distance and its conjugate (symmetric)."""
        base = self.dist_fn
        cross = None
        if self.matrix is None and self.cross_fn is not None:
            inner = self.cross_fn
            cross = lambda a, b: np.maximum(inner(a, b), np.asarray(inner(b, a)).T)
        return QPSpace(
            carrier=self.carrier,
            dist_fn=lambda x, y: max(base(x, y), base(y, x)),
            name=f"sup({self.name})",
            matrix=None if self.matrix is None else np.maximum(self.matrix, self.matrix.T),
            cross_fn=cross,
        )

    def sup_dist(self, x: Point, y: Point) -> float:
        self.require(x)
        self.require(y)
        return max(float(self.dist_fn(x, y)), float(self.dist_fn(y, x)))

    # -- balls ---------------------------------------------------------

    def in_ball(self, query: BallQuery, y: Point) -> bool:
        d = self.dist(query.center, y)
        if query.kind == "open":
            return d < query.radius
        return d <= query.radius


# -- constructors ------------------------------------------------------


def interval_space(
    lo: float,
    hi: float,
    dist_fn: Callable[[float, float], float],
    name: str = "interval",
    cross_fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
) -> QPSpace:
    return QPSpace(IntervalCarrier(float(lo), float(hi)), dist_fn, name=name, cross_fn=cross_fn)


def finite_space(matrix: Iterable[Iterable[float]], name: str = "finite") -> QPSpace:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("finite space needs a square distance matrix")
    if not np.isfinite(m).all():
        raise ValueError("distance matrix entries must be finite")
    if (m < 0).any():
        raise ValueError("distance matrix entries must be nonnegative")
    m = np.ascontiguousarray(m)
    return QPSpace(
        FiniteCarrier(m.shape[0]),
        lambda x, y: float(m[int(x), int(y)]),
        name=name,
        matrix=m,
    )


# -- axiom checks ------------------------------------------------------


def resolve_sample(
    space: QPSpace,
    sample: Union[str, Sequence[Point]] = "default",
    grid: int = DEFAULT_GRID_POINTS,
) -> list[Point]:
    """Turn a sample spec ("default" | "exhaustive" | explicit list) into points."""
    if isinstance(sample, str):
        if sample == "exhaustive":
            if not space.is_finite:
                raise UnsupportedError("exhaustive sampling needs a finite carrier")
            return space.points()
        if sample == "default":
            return space.grid(grid)
        raise ValueError(f"unknown sample spec {sample!r}")
    pts = list(sample)
    for p in pts:
        space.require(p)
    return pts


@dataclass
class AxiomReport:
    identity_violations: list  # (point, d(x,x))
    triangle_violations: list  # (x, y, z, d(x,z), d(x,y)+d(y,z))
    sample_size: int
    slack: float

    @property
    def passed(self) -> bool:
        return not self.identity_violations and not self.triangle_violations

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sample_size": self.sample_size,
            "slack": self.slack,
            "identity_violations": [list(v) for v in self.identity_violations],
            "triangle_violations": [list(v) for v in self.triangle_violations],
        }


@dataclass
class T0Report:
    violations: list  # (x, y, d(x,y), d(y,x)) with x != y and both ~0
    sample_size: int
    slack: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sample_size": self.sample_size,
            "slack": self.slack,
            "violations": [list(v) for v in self.violations],
        }


def check_axioms(
    space: QPSpace,
    sample: Union[str, Sequence[Point]] = "default",
    slack: float = DEFAULT_AXIOM_SLACK,
) -> AxiomReport:
    """Check d(x,x)=0 and the triangle inequality on a sample.

    Every violating point / triple is reported with its witnessing values.
    """
    pts = resolve_sample(space, sample)
    d = space.pairwise(pts)
    n = len(pts)

    identity = [
        (pts[i], float(d[i, i])) for i in range(n) if abs(d[i, i]) > slack
    ]

    # excess[i,j,k] = d(i,k) - d(i,j) - d(j,k); positive beyond slack is a violation
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    bad = np.argwhere(excess > slack)
    triangle = [
        (
            pts[i],
            pts[j],
            pts[k],
            float(d[i, k]),
            float(d[i, j] + d[j, k]),
        )
        for i, j, k in bad
    ]
    return AxiomReport(identity, triangle, n, slack)


def check_T0(
    space: QPSpace,
    sample: Union[str, Sequence[Point]] = "default",
    slack: float = DEFAULT_AXIOM_SLACK,
) -> T0Report:
    """List pairs x != y that the distance cannot separate in either direction."""
    pts = resolve_sample(space, sample)
    d = space.pairwise(pts)
    both_zero = (d <= slack) & (d.T <= slack)
    np.fill_diagonal(both_zero, False)
    viols = [
        (pts[i], pts[j], float(d[i, j]), float(d[j, i]))
        for i, j in np.argwhere(both_zero)
        if i < j
    ]
    return T0Report(viols, len(pts), slack)


# -- JSON wire format --------------------------------------------------


def space_to_json(space: QPSpace) -> dict:
    if space.is_finite:
        return {
            "kind": "finite",
            "n": space.carrier.size,
            "matrix": [[float(v) for v in row] for row in space.matrix],
        }
    if space.name.startswith("upper_interval"):
        return {
            "kind": "interval",
            "lo": space.carrier.lo,
            "hi": space.carrier.hi,
            "dist": "upper",
        }
    raise ValueError(f"space {space.name!r} has no JSON form")


def space_from_json(obj: dict) -> QPSpace:
    kind = obj.get("kind")
    if kind == "finite":
        m = obj["matrix"]
        if len(m) != obj.get("n", len(m)):
            raise ValueError("matrix size disagrees with declared n")
        return finite_space(m)
    if kind == "interval":
        if obj.get("dist", "upper") != "upper":
            raise ValueError(f"unknown interval distance {obj.get('dist')!r}")
        lo, hi = float(obj["lo"]), float(obj["hi"])
        return interval_space(
            lo,
            hi,
            lambda x, y: max(x - y, 0.0),
            name=f"upper_interval[{lo},{hi}]",
            cross_fn=lambda a, b: np.maximum(a[:, None] - b[None, :], 0.0),
        )
    raise ValueError(f"unknown space kind {kind!r}")


def space_from_file(path: str) -> QPSpace:
    with open(path) as fh:
        return space_from_json(json.load(fh))
