"""Stress minimization by iterated quadratic majorization.

Every outer iteration replaces the stress by its quadratic surrogate
``Psi(V; U)`` anchored at the current configuration ``U`` and lowers it
axis by axis with steepest descent and exact line search on
``phi(x) = x^T A x + x^T b``.  The outer loop never increases the stress.
"""

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import AlignmentError, StructuralError
from .stress import StressTrace, build_A, build_C, stress

OUTER_MAX = 500
OUTER_TOL = 1e-9
INNER_MAX = 200
INNER_TOL = 1e-10
TAU_NULL = 1e-14


def optimal_step(A, g):
    """Exact line-search step along ``-g`` for ``phi(x) = x^T A x + x^T b``.

    ``phi(x - s g) = phi(x) - s g^T g + s^2 g^T A g`` is minimized by
    ``s = g^T g / (2 g^T A g)``.  Returns ``None`` when ``g`` is (numerically)
    in the null space of ``A``, where ``phi`` is flat along ``g``.
    """
    gg = float(g @ g)
    gAg = float(g @ (A @ g))
    if gAg <= TAU_NULL * np.linalg.norm(A) * gg:
        return None
    return 0.5 * gg / gAg


def quadratic_descent(A, b, x0, inner_max=INNER_MAX, inner_tol=INNER_TOL):
    """Steepest descent with exact line search on ``x^T A x + x^T b``.

    ``b`` and ``x0`` may also be ``(n, k)`` arrays holding ``k`` independent
    problems that share ``A``; each column is solved on its own.  A column
    stops when ``||2Ax + b|| <= inner_tol * (1 + ||b||)``, when its gradient
    falls in the null space of ``A``, or after ``inner_max`` steps.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise StructuralError(f"A must be square, got shape {A.shape}")
    if np.linalg.norm(A - A.T) > 1e-12 * max(1.0, np.linalg.norm(A)):
        raise StructuralError("A is not symmetric")
    if b.ndim not in (1, 2) or b.shape[0] != A.shape[0]:
        raise StructuralError(f"b of shape {b.shape} does not match A")
    x = np.array(x0, dtype=float)
    if x.shape != b.shape:
        raise StructuralError(f"x0 of shape {x.shape} does not match b")
    if b.ndim == 1:
        return _descent(A, b[:, None], x[:, None], inner_max, inner_tol)[:, 0]
    return _descent(A, b, x, inner_max, inner_tol)


_REFRESH = 25


def _descent_numpy(A, B, X, inner_max, inner_tol, null_tol):
    for c in range(B.shape[1]):
        b = B[:, c]
        x = X[:, c].copy()
        tol = inner_tol * (1.0 + np.sqrt(b @ b))
        g = 2.0 * (A @ x) + b
        for k in range(inner_max):
            if k and k % _REFRESH == 0:
                # the recurrence for g drifts slowly
                g = 2.0 * (A @ x) + b
            gg = g @ g
            if np.sqrt(gg) <= tol:
                break
            Ag = A @ g
            gAg = g @ Ag
            if gAg <= null_tol * gg:
                break
            s = 0.5 * gg / gAg
            x -= s * g
            g -= (2.0 * s) * Ag
        X[:, c] = x
    return X


try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

if numba is not None:

    @numba.njit(cache=True)
    def _descent_jit(A, B, X, inner_max, inner_tol, null_tol):
        n, m = B.shape
        x = np.empty(n)
        g = np.empty(n)
        Ag = np.empty(n)
        for c in range(m):
            bb = 0.0
            for i in range(n):
                x[i] = X[i, c]
                bb += B[i, c] * B[i, c]
            tol = inner_tol * (1.0 + np.sqrt(bb))
            for k in range(inner_max):
                if k % _REFRESH == 0:
                    for i in range(n):
                        acc = 0.0
                        for j in range(n):
                            acc += A[i, j] * x[j]
                        g[i] = 2.0 * acc + B[i, c]
                gg = 0.0
                for i in range(n):
                    gg += g[i] * g[i]
                if np.sqrt(gg) <= tol:
                    break
                gAg = 0.0
                for i in range(n):
                    acc = 0.0
                    for j in range(n):
                        acc += A[i, j] * g[j]
                    Ag[i] = acc
                    gAg += g[i] * acc
                if gAg <= null_tol * gg:
                    break
                s = 0.5 * gg / gAg
                for i in range(n):
                    x[i] -= s * g[i]
                    g[i] -= 2.0 * s * Ag[i]
            for i in range(n):
                X[i, c] = x[i]
        return X


def _descent(A, B, X, inner_max, inner_tol, use_jit=True):
    """Solve the columns of ``B`` in place in ``X``; see :func:`quadratic_descent`."""
    null_tol = TAU_NULL * np.linalg.norm(A)
    if use_jit and numba is not None:
        return _descent_jit(
            np.ascontiguousarray(A), np.ascontiguousarray(B), X, int(inner_max), float(inner_tol), null_tol
        )
    return _descent_numpy(A, B, X, inner_max, inner_tol, null_tol)


def majorization_step(U, D, S, inner_max=INNER_MAX, inner_tol=INNER_TOL, A=None):
    """One outer update: minimize ``Psi(V; U)`` over ``V``, one axis at a time.

    Each axis ``a`` solves ``min_v v^T A v - 2 v^T C(U) U_a`` starting from
    ``U_a``.  The axes are independent and are batched into one call.
    ``A`` may be passed in to avoid rebuilding it.
    """
    U = np.asarray(U, dtype=float)
    if A is None:
        A = build_A(S)
    B = -2.0 * (build_C(U, D, S) @ U)
    return _descent(A, B, U.copy(), inner_max, inner_tol)


@dataclass(frozen=True)
class RandomInit:
    """Gaussian initial configuration.

    ``scale=None`` uses the mean off-diagonal target distance over sqrt(p).
    """

    seed: int = 0
    scale: Optional[float] = None


@dataclass(frozen=True, eq=False)
class GivenInit:
    Z: np.ndarray


@dataclass(frozen=True)
class SolverConfig:
    p: int = 2
    outer_max: int = OUTER_MAX
    outer_tol: float = OUTER_TOL
    inner_max: int = INNER_MAX
    inner_tol: float = INNER_TOL
    init: object = field(default_factory=RandomInit)
    restarts: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise StructuralError("restarts must be >= 1")
        if self.p < 1:
            raise StructuralError(f"target dimension must be >= 1, got {self.p}")
        if self.outer_max < 1 or self.inner_max < 1:
            raise StructuralError("iteration caps must be >= 1")
        if not (self.outer_tol > 0 and self.inner_tol > 0):
            raise StructuralError("tolerances must be positive")


class Termination(enum.Enum):
    TOLERANCE_REACHED = "tolerance"
    ITERATION_CAP = "cap"


@dataclass(frozen=True, eq=False)
class EmbeddingResult:
    Z: np.ndarray
    trace: StressTrace
    outer_iterations: int
    converged: bool
    termination: Termination

    @property
    def stress(self):
        return float(self.trace.values[-1])


def initial_configuration(D, cfg, init=None):
    n = D.n
    init = cfg.init if init is None else init
    if isinstance(init, GivenInit):
        Z = np.array(init.Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None]
        if Z.shape != (n, cfg.p):
            raise StructuralError(f"initial configuration has shape {Z.shape}, expected {(n, cfg.p)}")
        return Z
    scale = init.scale
    if scale is None:
        rows, cols = np.tril_indices(n, -1)
        scale = float(D.values[rows, cols].mean()) / np.sqrt(cfg.p)
    rng = np.random.default_rng(init.seed)
    return scale * rng.standard_normal((n, cfg.p))


def restart_inits(cfg):
    """Initializations tried by :func:`embed`.

    A single random start uses ``cfg.init.seed`` itself; with ``restarts > 1``
    the seeds are spawned from it.
    """
    init = cfg.init
    if cfg.restarts == 1 or not isinstance(init, RandomInit):
        return [init]
    children = np.random.SeedSequence(init.seed).spawn(cfg.restarts)
    return [RandomInit(int(c.generate_state(1)[0]), init.scale) for c in children]


def embed(D, S, cfg=None):
    """Find ``n`` points of R^p whose distances approximate ``D``.

    The returned configuration is centered at the origin; it is determined
    only up to rotation and reflection.  With ``cfg.restarts > 1`` and a
    random initialization, the run ending at the lowest stress is returned.
    """
    cfg = cfg or SolverConfig()
    n = D.n
    if n < 2:
        raise StructuralError(f"need at least 2 objects, got {n}")
    if S.n != n:
        raise StructuralError(f"weights for n={S.n} used with n={n}")
    A = build_A(S)
    best = None
    for init in restart_inits(cfg):
        result = _embed_from(initial_configuration(D, cfg, init), D, S, cfg, A)
        if best is None or result.stress < best.stress:
            best = result
    return best


def _embed_from(U, D, S, cfg, A):
    values = [stress(U, D, S)]
    termination = Termination.ITERATION_CAP
    iterations = 0
    if values[0] == 0.0:
        termination = Termination.TOLERANCE_REACHED
    else:
        for _ in range(cfg.outer_max):
            U = majorization_step(U, D, S, cfg.inner_max, cfg.inner_tol, A=A)
            values.append(stress(U, D, S))
            iterations += 1
            decrease = (values[-2] - values[-1]) / max(values[0], np.finfo(float).tiny)
            if decrease < cfg.outer_tol:
                termination = Termination.TOLERANCE_REACHED
                break

    Z = U - U.mean(axis=0)
    return EmbeddingResult(
        Z=Z,
        trace=StressTrace.from_values(values),
        outer_iterations=iterations,
        converged=termination is Termination.TOLERANCE_REACHED,
        termination=termination,
    )


class Alignment(NamedTuple):
    rotation: np.ndarray
    translation: np.ndarray
    rms: float

    def apply(self, Z):
        return np.asarray(Z, dtype=float) @ self.rotation.T + self.translation


def procrustes_align(Z, Y):
    """Orthogonal ``R`` and shift ``c`` minimizing ``sum ||R z_k + c - y_k||^2``.

    Reflections are allowed.  Returns an :class:`Alignment` holding ``R``,
    ``c`` and the RMS residual over the ``n`` points.
    """
    Z = np.asarray(Z, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Z.shape != Y.shape or Z.ndim != 2:
        raise StructuralError(f"cannot align shapes {Z.shape} and {Y.shape}")
    zbar = Z.mean(axis=0)
    ybar = Y.mean(axis=0)
    Zc = Z - zbar
    Yc = Y - ybar
    for name, M in (("Z", Zc), ("Y", Yc)):
        if np.linalg.norm(M) <= 1e-12 * max(1.0, np.abs(Z).max(), np.abs(Y).max()):
            raise AlignmentError(f"all points of {name} coincide")
    u, _, vt = np.linalg.svd(Zc.T @ Yc)
    R = vt.T @ u.T
    c = ybar - R @ zbar
    resid = Z @ R.T + c - Y
    rms = float(np.sqrt(np.mean(np.sum(resid**2, axis=1))))
    return Alignment(R, c, rms)
