"""Matrix manifolds, their Riemannian metrics and geodesic distances.

Four manifolds are supported:

========  ===========================================  ==================
tag       elements                                     intrinsic dimension
========  ===========================================  ==================
``SO``    real q x q rotations, x^T x = e, det x = 1     q(q-1)/2
``S``     unit vectors of R^q                          q-1
``SPD``   real symmetric positive-definite q x q       q(q+1)/2
``SU``    complex q x q, x^H x = e, det x = 1           q^2 - 1
========  ===========================================  ==================

Distances are the geodesic distances of the canonical metrics,

* SO:  d(x, y) = sqrt(-tr(log^2(x^T y)))
* S:   d(x, y) = arccos(x^T y)
* SPD: d(x, y) = sqrt(tr(log^2(x^-1 y)))
* SU:  d(x, y) = sqrt(-tr(log^2(x^H y)))

where ``log`` is the principal matrix logarithm.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import (
    CutLocusError,
    NotPositiveDefiniteError,
    StructuralError,
    ValidationError,
)
from .linalg import hermitian_function, jacobi_eigh, normal_eig
from .stress import DistanceMatrix

TAU_ORTH = 1e-8
TAU_PD = 1e-12
TAU_CUT = 1e-6
SU_IMAG_TOL = 1e-9


class Tag(enum.Enum):
    SO = "SO"
    SPHERE = "S"
    SPD = "SPD"
    SU = "SU"


@dataclass(frozen=True)
class ManifoldKind:
    """Which manifold a point lives on, and its size parameter ``q``."""

    tag: Tag
    q: int

    def __post_init__(self):
        if not isinstance(self.tag, Tag):
            object.__setattr__(self, "tag", Tag(self.tag))
        if int(self.q) != self.q:
            raise StructuralError(f"q must be an integer, got {self.q!r}")
        object.__setattr__(self, "q", int(self.q))
        lowest = 1 if self.tag is Tag.SPHERE else 2
        if self.q < lowest:
            raise StructuralError(f"{self.tag.value}({self.q}) needs q >= {lowest}")

    @classmethod
    def special_orthogonal(cls, q):
        return cls(Tag.SO, q)

    @classmethod
    def sphere(cls, q):
        return cls(Tag.SPHERE, q)

    @classmethod
    def spd(cls, q):
        return cls(Tag.SPD, q)

    @classmethod
    def special_unitary(cls, q):
        return cls(Tag.SU, q)

    @property
    def dimension(self):
        q = self.q
        return {
            Tag.SO: q * (q - 1) // 2,
            Tag.SPHERE: q - 1,
            Tag.SPD: q * (q + 1) // 2,
            Tag.SU: q * q - 1,
        }[self.tag]

    @property
    def shape(self):
        return (self.q,) if self.tag is Tag.SPHERE else (self.q, self.q)

    @property
    def dtype(self):
        return np.complex128 if self.tag is Tag.SU else np.float64

    def __str__(self):
        return f"{self.tag.value}({self.q})"


def _frozen(data, dtype):
    arr = np.array(data, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """An element of a supported manifold.

    The constructor only converts ``data`` to an immutable array of the
    kind's dtype.  Use :meth:`checked` (or :func:`validate`) to enforce the
    manifold invariants.
    """

    kind: ManifoldKind
    data: np.ndarray

    def __post_init__(self):
        if self.kind.tag is not Tag.SU and np.iscomplexobj(self.data):
            if np.any(np.imag(self.data) != 0):
                raise StructuralError(f"{self.kind} expects real data")
            object.__setattr__(self, "data", np.real(self.data))
        object.__setattr__(self, "data", _frozen(self.data, self.kind.dtype))

    @classmethod
    def checked(cls, kind, data, tolerance=TAU_ORTH):
        point = cls(kind, data)
        require_valid(point, tolerance)
        return point

    def __eq__(self, other):
        if not isinstance(other, ManifoldPoint):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.data, other.data)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector ``data`` at ``base``."""

    base: ManifoldPoint
    data: np.ndarray

    def __post_init__(self):
        kind = self.base.kind
        arr = np.asarray(self.data)
        if arr.shape != kind.shape:
            raise StructuralError(
                f"tangent data of shape {arr.shape} does not fit {kind}"
            )
        object.__setattr__(self, "data", _frozen(arr, kind.dtype))

    @property
    def kind(self):
        return self.base.kind


def _check_shape(point):
    if point.data.shape != point.kind.shape:
        raise StructuralError(
            f"data of shape {point.data.shape} does not fit {point.kind}"
        )


def _violations(point, tolerance):
    """List the invariants of ``point`` violated at ``tolerance``."""
    _check_shape(point)
    x = point.data
    kind = point.kind
    if not np.all(np.isfinite(x)):
        return ["non-finite entries"]
    q = kind.q
    out = []
    if kind.tag is Tag.SPHERE:
        if abs(np.linalg.norm(x) - 1.0) > tolerance:
            out.append("norm differs from 1")
    elif kind.tag in (Tag.SO, Tag.SU):
        gram = x.conj().T @ x
        if np.linalg.norm(gram - np.eye(q)) > tolerance * np.sqrt(q):
            out.append("not orthogonal/unitary")
        elif abs(np.linalg.det(x) - 1.0) > tolerance * q:
            out.append("determinant differs from 1")
    else:
        scale = max(1.0, np.linalg.norm(x))
        if np.linalg.norm(x - x.T) > tolerance * scale:
            out.append("not symmetric")
        elif jacobi_eigh(x)[0][0] <= TAU_PD:
            out.append("not positive-definite")
    return out


def validate(point, tolerance=TAU_ORTH):
    """Check the manifold invariants of ``point``.

    Returns ``True`` when every invariant holds within ``tolerance``.
    Raises :class:`StructuralError` if the data shape does not match the
    kind, which is a different failure from an invalid value.
    """
    return not _violations(point, tolerance)


def require_valid(point, tolerance=TAU_ORTH):
    problems = _violations(point, tolerance)
    if problems:
        exc = NotPositiveDefiniteError if "not positive-definite" in problems else ValidationError
        raise exc(f"invalid {point.kind} point: {', '.join(problems)}")


def validate_tangent(v, tolerance=TAU_ORTH):
    """Check that ``v`` lies in the tangent space at its base point."""
    x = v.base.data
    d = v.data
    tag = v.kind.tag
    scale = max(1.0, np.linalg.norm(d))
    if tag is Tag.SPHERE:
        return abs(x @ d) <= tolerance * scale
    if tag is Tag.SPD:
        return np.linalg.norm(d - d.T) <= tolerance * scale
    k = x.conj().T @ d
    return np.linalg.norm(k + k.conj().T) <= tolerance * scale


def inner_product(v, w):
    """Riemannian inner product of two tangent vectors at the same point."""
    if v.kind != w.kind or not np.array_equal(v.base.data, w.base.data):
        raise StructuralError("tangent vectors are attached to different points")
    tag = v.kind.tag
    if tag in (Tag.SO, Tag.SPHERE):
        return float(np.sum(v.data * w.data))
    if tag is Tag.SPD:
        x = v.base.data
        a = np.linalg.solve(x, v.data)
        b = np.linalg.solve(x, w.data)
        return float(np.trace(a @ b))
    val = np.sum(v.data.conj() * w.data)
    if abs(val.imag) > SU_IMAG_TOL * (1.0 + abs(val.real)):
        raise ValidationError(
            f"inner product has imaginary residue {val.imag:.3e}; "
            "arguments are not tangent vectors"
        )
    return float(val.real)


def _require_kind(point, tag):
    if point.kind.tag is not tag:
        raise StructuralError(f"expected a {tag.value} point, got {point.kind}")


def _require_pair(x, y, tag):
    _require_kind(x, tag)
    _require_kind(y, tag)
    if x.kind != y.kind:
        raise StructuralError(f"points live on {x.kind} and {y.kind}")
    require_valid(x)
    require_valid(y)


def _phase_norm(m, what):
    """sqrt(sum(arg(lambda)^2)) over the spectrum of a unitary matrix."""
    lam, _ = normal_eig(m)
    phases = np.angle(lam)
    worst = np.max(np.abs(phases))
    if worst > np.pi - TAU_CUT:
        raise CutLocusError(
            f"{what} has an eigenvalue at angle {worst:.9f}, within "
            f"{TAU_CUT:g} of pi; the principal logarithm is not unique"
        )
    return float(np.sqrt(np.sum(phases**2)))


def sphere_distance(x, y):
    """Great-circle distance ``arccos(x^T y)`` in ``[0, pi]``."""
    _require_pair(x, y, Tag.SPHERE)
    if np.array_equal(x.data, y.data):
        return 0.0
    c = float(np.clip(x.data @ y.data, -1.0, 1.0))
    return float(np.arccos(c))


def so_distance(x, y):
    """Geodesic distance on SO(q); raises :class:`CutLocusError` near angle pi."""
    _require_pair(x, y, Tag.SO)
    if np.array_equal(x.data, y.data):
        return 0.0
    return _phase_norm(x.data.T @ y.data, "x^T y")


def spd_distance(x, y):
    """Affine-invariant distance on symmetric positive-definite matrices.

    Evaluated as ``sqrt(sum(log(l_i)^2))`` with ``l_i`` the eigenvalues of
    ``x^{-1/2} y x^{-1/2}``, which is similar to ``x^{-1} y``.
    """
    _require_pair(x, y, Tag.SPD)
    if np.array_equal(x.data, y.data):
        return 0.0
    w, v = jacobi_eigh(x.data)
    if w[0] <= TAU_PD:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {w[0]:.3e} <= {TAU_PD:g}")
    x_isqrt = (v / np.sqrt(w)) @ v.T
    lam = jacobi_eigh(x_isqrt @ y.data @ x_isqrt)[0]
    if lam[0] <= 0.0:
        raise NotPositiveDefiniteError("y is not positive-definite")
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def su_distance(x, y):
    """Geodesic distance on SU(q); raises :class:`CutLocusError` near phase pi."""
    _require_pair(x, y, Tag.SU)
    if np.array_equal(x.data, y.data):
        return 0.0
    return _phase_norm(x.data.conj().T @ y.data, "x^H y")


_DISTANCES = {
    Tag.SO: so_distance,
    Tag.SPHERE: sphere_distance,
    Tag.SPD: spd_distance,
    Tag.SU: su_distance,
}


def distance(x, y):
    """Geodesic distance between two points of the same manifold.

    The pair is put in a canonical order before evaluation, so that
    ``distance(x, y) == distance(y, x)`` holds bit for bit.
    """
    if x.kind != y.kind:
        raise StructuralError(f"cannot measure between {x.kind} and {y.kind}")
    if y.data.tobytes() < x.data.tobytes():
        x, y = y, x
    return _DISTANCES[x.kind.tag](x, y)


def pairwise_distances(points, workers=None):
    """Matrix of geodesic distances between all pairs of ``points``.

    Each pair is evaluated independently; with ``workers > 1`` the pairs are
    spread over a thread pool.  The result does not depend on the number of
    workers.
    """
    points = list(points)
    n = len(points)
    if n < 2:
        raise StructuralError(f"need at least 2 points, got {n}")
    kind = points[0].kind
    for k, p in enumerate(points):
        if p.kind != kind:
            raise StructuralError(f"point {k} lives on {p.kind}, expected {kind}")

    pairs = list(combinations(range(n), 2))

    def one(pair):
        i, j = pair
        try:
            return distance(points[i], points[j])
        except CutLocusError as exc:
            raise CutLocusError(f"pair ({i}, {j}): {exc}", pair=(i, j)) from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, pairs))
    else:
        values = [one(pair) for pair in pairs]

    d = np.zeros((n, n))
    for (i, j), value in zip(pairs, values):
        d[i, j] = d[j, i] = value
    return DistanceMatrix(d)


def so_log(x):
    """Principal logarithm of a rotation matrix (a real skew matrix)."""
    _require_kind(x, Tag.SO)
    lam, z = normal_eig(x.data)
    phases = np.angle(lam)
    if np.max(np.abs(phases)) > np.pi - TAU_CUT:
        raise CutLocusError("rotation angle too close to pi for a principal log")
    omega = ((z * (1j * phases)) @ z.conj().T).real
    return 0.5 * (omega - omega.T)


def so_exp(base, omega):
    """Move from ``base`` along the left-invariant direction ``omega``.

    Returns ``base @ expm(omega)`` for a skew-symmetric ``omega``.
    """
    _require_kind(base, Tag.SO)
    omega = np.asarray(omega, dtype=float)
    if omega.shape != base.kind.shape:
        raise StructuralError(f"omega of shape {omega.shape} does not fit {base.kind}")
    if np.linalg.norm(omega + omega.T) > TAU_ORTH * max(1.0, np.linalg.norm(omega)):
        raise ValidationError("omega is not skew-symmetric")
    if not np.any(omega):
        return base
    return ManifoldPoint(base.kind, base.data @ scipy.linalg.expm(omega))


def random_point(kind, seed):
    """Draw a point of ``kind``, deterministically from ``seed``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    q = kind.q
    tag = kind.tag
    if tag is Tag.SPHERE:
        g = rng.standard_normal(q)
        return ManifoldPoint(kind, g / np.linalg.norm(g))
    if tag is Tag.SO:
        qm, r = np.linalg.qr(rng.standard_normal((q, q)))
        qm = qm * np.sign(np.diag(r))
        if np.linalg.det(qm) < 0:
            qm[:, 0] = -qm[:, 0]
        return ManifoldPoint(kind, qm)
    if tag is Tag.SPD:
        g = rng.standard_normal((q, q))
        s = (g + g.T) / (2.0 * np.sqrt(q))
        x = hermitian_function(s, lambda w: np.exp(np.clip(w, -2.0, 2.0)))
        return ManifoldPoint(kind, 0.5 * (x + x.T))
    g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    qm, r = np.linalg.qr(g)
    d = np.diag(r)
    qm = qm * (d / np.abs(d))
    qm = qm / np.linalg.det(qm) ** (1.0 / q)
    return ManifoldPoint(kind, qm)


def random_skew(q, rng):
    """Random skew-symmetric q x q matrix with unit Frobenius norm."""
    g = rng.standard_normal((q, q))
    k = g - g.T
    return k / np.linalg.norm(k)


def geodesic_walk(kind, n_steps, step_scale, decay, seed):
    """Random walk on SO(q) made of geodesic steps of shrinking length.

    Step ``k`` moves by ``step_scale * decay**k`` along a random unit-norm
    skew direction, so ``d(x_k, x_{k+1}) = step_scale * decay**k`` as long as
    the step stays below pi.  Returns the ``n_steps`` visited points,
    starting from a random rotation.
    """
    if kind.tag is not Tag.SO:
        raise StructuralError(f"geodesic_walk runs on SO(q), got {kind}")
    if n_steps < 2:
        raise StructuralError(f"n_steps must be >= 2, got {n_steps}")
    if step_scale < 0:
        raise StructuralError("step_scale must be nonnegative")
    if not 0.0 < decay <= 1.0:
        raise StructuralError(f"decay must lie in (0, 1], got {decay}")
    rng = np.random.default_rng(seed)
    x = random_point(kind, rng)
    path = [x]
    for k in range(n_steps - 1):
        omega = step_scale * decay**k * random_skew(kind.q, rng)
        x = so_exp(x, omega)
        path.append(x)
    return path
