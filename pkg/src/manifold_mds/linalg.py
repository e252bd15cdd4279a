"""Small dense linear-algebra kernels.

The Hermitian eigensolver is a cyclic Jacobi method.  It is meant for the
small matrices met on the supported manifolds (q up to a few tens), where it
is accurate to working precision and has no dependency beyond numpy.
"""

import numpy as np
import scipy.linalg

from .errors import StructuralError

JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.linalg.norm(off)


def jacobi_eigh(m, rtol=JACOBI_RTOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric or complex Hermitian matrix.

    Parameters
    ----------
    m : ndarray, shape (q, q)
        Symmetric (real) or Hermitian (complex) matrix.  Only the Hermitian
        part ``(m + m^H) / 2`` is used.
    rtol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``rtol * ||m||_F``.
    max_sweeps : int
        Hard cap on the number of cyclic sweeps.

    Returns
    -------
    w : ndarray, shape (q,)
        Real eigenvalues in ascending order.
    v : ndarray, shape (q, q)
        Orthonormal (unitary) eigenvectors stored column-wise, so that
        ``m = v @ diag(w) @ v^H``.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {m.shape}")
    is_complex = np.iscomplexobj(m)
    dtype = np.complex128 if is_complex else np.float64
    a = np.array(m, dtype=dtype)
    a = 0.5 * (a + a.conj().T)
    q = a.shape[0]
    v = np.eye(q, dtype=dtype)

    threshold = rtol * np.linalg.norm(a)
    polished = False
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            # convergence is quadratic, one more sweep is nearly free
            if polished:
                break
            polished = True
        for p in range(q - 1):
            for r in range(p + 1, q):
                apr = a[p, r]
                mag = abs(apr)
                if mag == 0.0:
                    continue
                # phase that makes the 2x2 block real symmetric
                phase = np.conj(apr) / mag
                app = a[p, p].real
                arr = a[r, r].real
                theta = (arr - app) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                g = np.array([[c, s], [-s * phase, c * phase]], dtype=dtype)
                idx = [p, r]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, r] = 0.0
                a[r, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_function(m, func):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = jacobi_eigh(m)
    return (v * func(w)) @ v.conj().T


def normal_eig(m):
    """Eigenvalues and unitary eigenvectors of a normal matrix.

    Uses the complex Schur form, which is diagonal for normal matrices up to
    rounding; the strictly upper triangle is discarded.
    """
    t, z = scipy.linalg.schur(np.asarray(m, dtype=np.complex128), output="complex")
    return np.diag(t).copy(), z
