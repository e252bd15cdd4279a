"""Weighted stress and its quadratic majorization.

For target distances ``d_ij``, weights ``w_ij`` and a normalization ``M``
the weighted stress of a configuration ``Z`` (one row per object) is::

    Phi(Z) = M * sum_{i<j} w_ij * (||z_i - z_j|| - d_ij)**2

Kruskal, Sammon and Dwyer-Koren-Marriott (DKM) stress are the special cases
built by :func:`make_weights`.  The surrogate ``Psi(Z; U)`` built from the
weighted Laplacian ``A`` and the matrix ``C(U)`` bounds the *unnormalized*
stress from above and touches it at ``Z = U``; ``M`` only rescales the
objective, so the optimizer works on the unnormalized quantities.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateDistanceError, StructuralError, TraceError

TAU_DIST = 1e-12
TAU_COINC = 1e-12
SYMMETRY_RTOL = 1e-12


def _readonly(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric, nonnegative ``n x n`` matrix with zero diagonal.

    Asymmetry or a nonzero diagonal up to ``1e-12`` (relative to the largest
    entry) is tolerated and cleaned away; anything larger is rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.values, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise StructuralError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise StructuralError("distance matrix has non-finite entries")
        atol = SYMMETRY_RTOL * max(1.0, float(np.max(np.abs(d), initial=0.0)))
        bad = np.argwhere(np.abs(d - d.T) > atol)
        if len(bad):
            i, j = bad[0]
            raise StructuralError(f"distance matrix is not symmetric at ({i}, {j})")
        bad = np.flatnonzero(np.abs(np.diag(d)) > atol)
        if len(bad):
            raise StructuralError(f"distance matrix has nonzero diagonal at {bad[0]}")
        bad = np.argwhere(d < 0)
        if len(bad):
            i, j = bad[0]
            raise StructuralError(f"distance matrix has a negative entry at ({i}, {j})")
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        object.__setattr__(self, "values", _readonly(d))

    @property
    def n(self):
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


class Scheme(str, Enum):
    KRUSKAL = "kruskal"
    SAMMON = "sammon"
    DKM = "dkm"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class WeightScheme:
    """Weights ``w_ij`` (zero diagonal) and normalization ``M`` of a stress."""

    variant: Scheme
    M: float
    W: np.ndarray

    def __post_init__(self):
        w = np.array(self.W, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise StructuralError(f"weight matrix must be square, got shape {w.shape}")
        np.fill_diagonal(w, 0.0)
        if not np.array_equal(w, w.T):
            raise StructuralError("weight matrix is not symmetric")
        off = ~np.eye(w.shape[0], dtype=bool)
        if not np.all(w[off] > 0) or not np.all(np.isfinite(w)):
            raise StructuralError("off-diagonal weights must be finite and positive")
        if not self.M > 0:
            raise StructuralError(f"normalization M must be positive, got {self.M}")
        object.__setattr__(self, "variant", Scheme(self.variant))
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "W", _readonly(w))

    @property
    def n(self):
        return self.W.shape[0]


def _offdiag_pairs(n):
    return np.tril_indices(n, -1)


def make_weights(variant, D, weights=None):
    """Build the weight scheme of a named stress for distance matrix ``D``.

    Parameters
    ----------
    variant : {"kruskal", "sammon", "dkm", "custom"}
    D : DistanceMatrix
    weights : array_like, optional
        Symmetric matrix with positive off-diagonal entries; required for
        (and only used by) the ``"custom"`` variant, which takes ``M = 1``.

    Raises
    ------
    DegenerateDistanceError
        For Sammon and DKM weights when two distinct objects are at zero
        distance, since ``1/d`` is undefined there.
    """
    variant = Scheme(variant)
    d = D.values
    n = D.n
    if variant is Scheme.CUSTOM:
        if weights is None:
            raise StructuralError("custom scheme needs a weight matrix")
        w = np.array(weights, dtype=float)
        if w.shape != d.shape:
            raise StructuralError(f"weights of shape {w.shape} do not match n={n}")
        return WeightScheme(variant, 1.0, w)
    if variant is Scheme.KRUSKAL:
        return WeightScheme(variant, 1.0, np.ones((n, n)))

    rows, cols = _offdiag_pairs(n)
    small = np.flatnonzero(d[rows, cols] <= TAU_DIST)
    if len(small):
        i, j = int(rows[small[0]]), int(cols[small[0]])
        raise DegenerateDistanceError(
            f"objects {j} and {i} are at zero distance; {variant.value} weights undefined",
            pair=(j, i),
        )
    safe = d + np.eye(n)
    if variant is Scheme.SAMMON:
        return WeightScheme(variant, 1.0 / d[rows, cols].sum(), 1.0 / safe)
    return WeightScheme(variant, 1.0, 1.0 / safe**2)


def _check_config(Z, n):
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    if Z.ndim != 2 or Z.shape[0] != n:
        raise StructuralError(f"configuration of shape {Z.shape} does not have {n} rows")
    return Z


def embedded_distances(Z):
    """Euclidean distances between the rows of ``Z``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    diff = Z[:, None, :] - Z[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def stress(Z, D, S, normalized=True):
    """Weighted stress of configuration ``Z``; ``normalized=False`` drops ``M``."""
    n = D.n
    if S.n != n:
        raise StructuralError(f"weights for n={S.n} used with n={n}")
    Z = _check_config(Z, n)
    rows, cols = _offdiag_pairs(n)
    resid = embedded_distances(Z)[rows, cols] - D.values[rows, cols]
    total = float(np.sum(S.W[rows, cols] * resid**2))
    return S.M * total if normalized else total


def build_A(S):
    """Weighted graph Laplacian of the weights: ``A = diag(W 1) - W``."""
    W = S.W
    A = -W.copy()
    A[np.diag_indices_from(A)] = W.sum(axis=1)
    return A


def build_C(U, D, S):
    """The matrix ``C(U)``, with zero entries for coincident points of ``U``.

    Off-diagonal entries are ``-w_ij d_ij / ||u_i - u_j||``; pairs closer than
    ``1e-12`` contribute zero, which keeps ``Psi`` a valid upper bound.
    """
    n = D.n
    U = _check_config(U, n)
    E = embedded_distances(U)
    far = E >= TAU_COINC
    np.fill_diagonal(far, False)
    ratio = np.zeros((n, n))
    ratio[far] = S.W[far] * D.values[far] / E[far]
    C = -ratio
    C[np.diag_indices_from(C)] = ratio.sum(axis=1)
    return C


def majorization_value(Z, U, D, S):
    """Surrogate ``Psi(Z; U)`` bounding the unnormalized stress at ``Z``.

    ``Psi(Z; U) = sum_{i<j} w_ij d_ij**2 + sum_a (Z_a^T A Z_a - 2 Z_a^T C(U) U_a)``
    """
    n = D.n
    Z = _check_config(Z, n)
    U = _check_config(U, n)
    if Z.shape != U.shape:
        raise StructuralError(f"Z has shape {Z.shape} but U has shape {U.shape}")
    rows, cols = _offdiag_pairs(n)
    const = float(np.sum(S.W[rows, cols] * D.values[rows, cols] ** 2))
    A = build_A(S)
    C = build_C(U, D, S)
    quad = float(np.sum(Z * (A @ Z)))
    lin = float(np.sum(Z * (C @ U)))
    return const + quad - 2.0 * lin


def stress_trace_db(values):
    """Stress history relative to its first entry, in decibels."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise TraceError("empty stress trace")
    if not values[0] > 0:
        raise TraceError("initial stress is zero; the embedding is already exact")
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(values / values[0])


@dataclass(frozen=True, eq=False)
class StressTrace:
    """Stress value after every outer iteration, with its dB normalization.

    ``db`` is ``None`` when the initial stress is zero.
    """

    values: np.ndarray
    db: np.ndarray = None

    @classmethod
    def from_values(cls, values):
        values = _readonly(values)
        try:
            db = _readonly(stress_trace_db(values))
        except TraceError:
            db = None
        return cls(values, db)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, StressTrace):
            return NotImplemented
        same_db = (self.db is None and other.db is None) or (
            self.db is not None and other.db is not None and np.array_equal(self.db, other.db)
        )
        return np.array_equal(self.values, other.values) and same_db

    __hash__ = None
