"""Small dense complex linear algebra for 2x2, 4x4 and 16x16 matrices.

Matrices are plain ``numpy`` arrays. Two-qubit matrices use the basis order
``|ee>, |eg>, |ge>, |gg>`` throughout the package, and density matrices are
vectorized by stacking columns (``rho.reshape(-1, order="F")``), so that
``vec(X @ rho @ Y) == kron(Y.T, X) @ vec(rho)``.
"""

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    EmptyKernel,
    NonHermitianInput,
    OverflowRisk,
)

HERMITIAN_TOL = 1e-10
KERNEL_TOL = 1e-9
EXPM_NORM_CAP = 1e5
JACOBI_MAX_SWEEPS = 60


def vec(rho):
    """Column-stacking vectorization."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim, order="F")


def hermitize(a):
    a = np.asarray(a)
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))), initial=0.0))


def _jacobi(a, want_vectors):
    # Cyclic complex Jacobi, vectorized over a leading batch axis.
    a = np.array(a, dtype=complex)
    batch, d, _ = a.shape
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy() if want_vectors else None
    scale = np.linalg.norm(a.reshape(batch, -1), axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    offmask = ~np.eye(d, dtype=bool)
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)]
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if np.all(off <= 1e-15 * scale):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            r = np.abs(apq)
            active = r > 1e-300
            if not np.any(active):
                continue
            phase = np.where(active, apq / np.where(active, r, 1.0), 1.0)
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            zeta = np.where(active, (aqq - app) / (2.0 * np.where(active, r, 1.0)), 0.0)
            az = np.abs(zeta)
            # hypot avoids overflowing zeta**2 when the off-diagonal entry is tiny
            t = np.where(zeta >= 0, 1.0, -1.0) / (az + np.hypot(1.0, az))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            pc = np.conj(phase)
            # J restricted to (p, q) is diag(1, conj(phase)) @ [[c, s], [-s, c]]
            j = np.empty((batch, 2, 2), dtype=complex)
            j[:, 0, 0] = c
            j[:, 0, 1] = s
            j[:, 1, 0] = -pc * s
            j[:, 1, 1] = pc * c
            idx = [p, q]
            a[:, :, idx] = a[:, :, idx] @ j
            a[:, idx, :] = np.conj(np.swapaxes(j, 1, 2)) @ a[:, idx, :]
            if want_vectors:
                v[:, :, idx] = v[:, :, idx] @ j
    else:
        raise ConvergenceFailure(
            f"Jacobi iteration did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )
    w = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if want_vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def hermitian_eigenvalues(a, tol=HERMITIAN_TOL, vectors=False):
    """Eigenvalues (ascending) of a Hermitian matrix or a stack of them.

    Parameters
    ----------
    a : array_like, shape (d, d) or (N, d, d)
    tol : float
        Hermiticity tolerance, ``max |a_ij - conj(a_ji)|``.
    vectors : bool
        Also return eigenvectors as columns, ordered like the eigenvalues.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if not defect <= tol:
        raise NonHermitianInput(f"hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    stack = a.reshape((-1,) + a.shape[-2:])
    w, v = _jacobi(hermitize(stack), vectors)
    w = w.reshape(a.shape[:-1])
    if vectors:
        return w, v.reshape(a.shape)
    return w


def min_eigenvalue(a, tol=HERMITIAN_TOL):
    return hermitian_eigenvalues(a, tol)[..., 0]


def partial_transpose(rho):
    """Transpose the second-qubit indices of a 4x4 matrix (or a stack)."""
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise DimensionMismatch(f"partial transpose needs 4x4 input, got {rho.shape}")
    lead = rho.shape[:-2]
    t = rho.reshape(lead + (2, 2, 2, 2))
    t = np.swapaxes(t, -3, -1)
    return t.reshape(lead + (4, 4))


# Pade coefficients and scaling thresholds from Higham (2005).
_PADE_B = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0,
    ),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade(a, order):
    b = _PADE_B[order]
    ident = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    if order < 13:
        powers = [ident, a2]
        while len(powers) < (order + 1) // 2:
            powers.append(powers[-1] @ a2)
        u = a @ sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        v = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return u, v
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return u, v


def matrix_exponential(a, t=1.0, cap=EXPM_NORM_CAP):
    """``exp(a * t)`` by Pade scaling and squaring.

    Raises :class:`OverflowRisk` when ``||a t||_1`` exceeds ``cap``.
    """
    x = np.asarray(a, dtype=complex) * t
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise OverflowRisk("non-finite entries")
    norm = np.linalg.norm(x, 1)
    if norm > cap:
        raise OverflowRisk(f"||A t||_1 = {norm:.3e} exceeds cap {cap:.1e}")
    if norm == 0.0:
        return np.eye(x.shape[0], dtype=complex)
    for order in (3, 5, 7, 9):
        if norm <= _THETA[order]:
            u, v = _pade(x, order)
            return np.linalg.solve(v - u, v + u)
    s = max(0, int(np.ceil(np.log2(norm / _THETA[13]))))
    u, v = _pade(x / 2.0 ** s, 13)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


def kernel_vector(a, tol=KERNEL_TOL):
    """Unit vector spanning the (numerical) null space of ``a``.

    Returns ``(v, kernel_dim)`` where ``kernel_dim`` counts singular values
    at or below ``tol * ||a||_2``. The global phase is fixed by making the
    largest-magnitude entry real and positive.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got shape {a.shape}")
    _, s, vh = np.linalg.svd(a)
    norm = s[0] if s.size else 0.0
    threshold = tol * norm
    kernel_dim = int(np.count_nonzero(s <= threshold))
    if kernel_dim == 0:
        raise EmptyKernel(
            f"smallest singular value {s[-1]:.3e} above {threshold:.3e}"
        )
    v = np.conj(vh[-1])
    k = int(np.argmax(np.abs(v)))
    v = v * (np.abs(v[k]) / v[k])
    v = v / np.linalg.norm(v)
    return v, kernel_dim
