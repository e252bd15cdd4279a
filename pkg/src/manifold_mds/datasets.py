"""Bundled and synthetic datasets."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DatasetError
from .manifolds import ManifoldKind, ManifoldPoint, geodesic_walk, pairwise_distances, random_point
from .stress import DistanceMatrix, embedded_distances

# Airline distances in miles between nine US cities, from the ten-city table
# that is the usual MDS teaching example (Washington DC dropped).
CITY_LABELS = (
    "Atlanta",
    "Chicago",
    "Denver",
    "Houston",
    "Los Angeles",
    "Miami",
    "New York",
    "San Francisco",
    "Seattle",
)
CITY_MILES = np.array(
    [
        [0, 587, 1212, 701, 1936, 604, 748, 2139, 2182],
        [587, 0, 920, 940, 1745, 1188, 713, 1858, 1737],
        [1212, 920, 0, 879, 831, 1726, 1631, 949, 1021],
        [701, 940, 879, 0, 1374, 968, 1420, 1645, 1891],
        [1936, 1745, 831, 1374, 0, 2339, 2451, 347, 959],
        [604, 1188, 1726, 968, 2339, 0, 1092, 2594, 2734],
        [748, 713, 1631, 1420, 2451, 1092, 0, 2571, 2408],
        [2139, 1858, 949, 1645, 347, 2594, 2571, 0, 678],
        [2182, 1737, 1021, 1891, 959, 2734, 2408, 678, 0],
    ],
    dtype=float,
)


@dataclass(frozen=True, eq=False)
class RawDistances:
    labels: tuple
    D: DistanceMatrix

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        _check_labels(self.labels, self.D.n)

    @property
    def n(self):
        return self.D.n

    def distances(self, workers=None):
        return self.D

    def __eq__(self, other):
        if not isinstance(other, RawDistances):
            return NotImplemented
        return self.labels == other.labels and self.D == other.D


@dataclass(frozen=True, eq=False)
class ManifoldPoints:
    kind: ManifoldKind
    labels: tuple
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "points", tuple(self.points))
        _check_labels(self.labels, len(self.points))
        for k, p in enumerate(self.points):
            if p.kind != self.kind:
                raise DatasetError(f"point {k} lives on {p.kind}, expected {self.kind}")

    @property
    def n(self):
        return len(self.points)

    def distances(self, workers=None):
        return pairwise_distances(self.points, workers=workers)

    def __eq__(self, other):
        if not isinstance(other, ManifoldPoints):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.labels == other.labels
            and len(self.points) == len(other.points)
            and all(a == b for a, b in zip(self.points, other.points))
        )


def _check_labels(labels, n):
    if len(labels) != n:
        raise DatasetError(f"{len(labels)} labels for {n} objects")
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(s for s in labels if s in seen or seen.add(s))
        raise DatasetError(f"duplicate label {dup!r}")


def default_labels(n):
    return tuple(str(k + 1) for k in range(n))


def cities():
    """The nine-city airline distance table."""
    return RawDistances(CITY_LABELS, DistanceMatrix(CITY_MILES))


def planar_points(n=10, seed=0):
    """``n`` points drawn uniformly in the unit square."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 1.0, size=(n, 2))


def planar(n=10, seed=0):
    X = planar_points(n, seed)
    return RawDistances(default_labels(n), DistanceMatrix(embedded_distances(X))), X


def sphere(n=15, q=3, seed=0):
    """``n`` random unit vectors of R^q."""
    kind = ManifoldKind.sphere(q)
    rng = np.random.default_rng(seed)
    points = [random_point(kind, rng) for _ in range(n)]
    return ManifoldPoints(kind, default_labels(n), points)


def random_points(kind, n, seed=0):
    rng = np.random.default_rng(seed)
    return ManifoldPoints(kind, default_labels(n), [random_point(kind, rng) for _ in range(n)])


def downsample_indices(n_total, n_keep):
    """``n_keep`` indices spread uniformly over ``range(n_total)``, ends included."""
    if n_keep >= n_total:
        return np.arange(n_total)
    return np.unique(np.round(np.linspace(0, n_total - 1, n_keep)).astype(int))


def trajectory(q=9, steps=200, keep: Optional[int] = 20, step_scale=0.3, decay=0.97, seed=0):
    """Down-sampled geodesic random walk on SO(q), labeled ``1..keep``."""
    kind = ManifoldKind.special_orthogonal(q)
    path = geodesic_walk(kind, steps, step_scale, decay, seed)
    idx = downsample_indices(steps, keep if keep else steps)
    points = [path[i] for i in idx]
    return ManifoldPoints(kind, default_labels(len(points)), points)
