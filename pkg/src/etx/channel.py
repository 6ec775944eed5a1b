"""Second-order moments of the two-mode driving field.

Quadratures are ordered ``(q1, p1, q2, p2)`` and normalized so that the vacuum
has unit diagonal, ``M_ab = <{x_a, x_b}>`` with ``[q, p] = i``. In standard
form the moment matrix is ``[[n I, c], [c, m I]]`` with ``c = diag(c1, c2)``;
the canonical correlation pattern is ``c1 = -c2 = c >= 0``.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBlock, InvalidInput, InvalidParameters, UnphysicalChannel
from .qmath import hermitian_eigenvalues

UNCERTAINTY_TOL = 1e-10

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Y2 = np.kron(np.eye(2), _SIGMA_Y)


@dataclass(frozen=True)
class MomentMatrix:
    """Standard-form moments ``(n, m, c1, c2)``."""

    n: float
    m: float
    c1: float
    c2: float

    def __post_init__(self):
        if not (self.n >= 0 and self.m >= 0):
            raise InvalidParameters(f"local moments must be non-negative (n={self.n}, m={self.m})")

    @classmethod
    def symmetric(cls, n, c, m=None):
        """Canonical ``c1 = -c2 = c`` form; ``m`` defaults to ``n``."""
        return cls(float(n), float(n if m is None else m), float(c), -float(c))

    @property
    def c(self):
        """Common correlation magnitude when ``|c1| == |c2|``, else ``None``."""
        if abs(abs(self.c1) - abs(self.c2)) <= 1e-12 * max(1.0, abs(self.c1)):
            return abs(self.c1)
        return None

    def matrix(self):
        n, m, c1, c2 = self.n, self.m, self.c1, self.c2
        return np.array(
            [[n, 0, c1, 0], [0, n, 0, c2], [c1, 0, m, 0], [0, c2, 0, m]], dtype=float
        )

    def partial_transpose(self):
        """Moments after ``p2 -> -p2``."""
        return MomentMatrix(self.n, self.m, self.c1, -self.c2)


def _as_array(moments):
    if isinstance(moments, MomentMatrix):
        return moments.matrix()
    a = np.asarray(moments, dtype=float)
    if a.shape != (4, 4):
        raise InvalidInput(f"moment matrix must be 4x4, got {a.shape}")
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise InvalidInput("raw moment matrix is not symmetric")
    return a


def uncertainty_margin(moments):
    """Smallest eigenvalue of ``M - sigma_y (+) sigma_y``."""
    return float(hermitian_eigenvalues(_as_array(moments) - SIGMA_Y2)[0])


def check_uncertainty(moments):
    """True iff ``M - sigma_y (+) sigma_y`` is positive semidefinite."""
    return uncertainty_margin(moments) >= -UNCERTAINTY_TOL


def is_gaussian_entangled(moments):
    """PPT test: entangled iff flipping ``p2`` violates the uncertainty form.

    For ``|c1| == |c2| = c`` this coincides with ``(n - 1)(m - 1) < c**2``.
    """
    if not check_uncertainty(moments):
        raise UnphysicalChannel("moment matrix violates the uncertainty principle")
    if isinstance(moments, MomentMatrix):
        flipped = moments.partial_transpose()
    else:
        flipped = _P2_FLIP @ _as_array(moments) @ _P2_FLIP
    entangled = uncertainty_margin(flipped) < -UNCERTAINTY_TOL
    if not isinstance(moments, MomentMatrix):
        return entangled
    c = moments.c
    if c is not None and moments.c1 * moments.c2 <= 0:
        gap = c * c - (moments.n - 1.0) * (moments.m - 1.0)
        # the eigenvalue test has a tolerance band; only compare outside it
        if abs(gap) > 1e-8:
            assert entangled == (gap > 0), "PPT test disagrees with closed form"
    return entangled


_P2_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])


def gaussian_entangled_batch(stack):
    """Vectorized PPT test on an ``(N, 4, 4)`` stack of moment matrices.

    Returns ``(physical, entangled)`` boolean arrays; ``entangled`` is only
    meaningful where ``physical`` holds.
    """
    a = np.asarray(stack, dtype=float)
    if a.ndim != 3 or a.shape[1:] != (4, 4):
        raise InvalidInput(f"expected an (N, 4, 4) stack, got {a.shape}")
    phys = hermitian_eigenvalues(a - SIGMA_Y2)[:, 0] >= -UNCERTAINTY_TOL
    flipped = _P2_FLIP @ a @ _P2_FLIP
    ent = hermitian_eigenvalues(flipped - SIGMA_Y2)[:, 0] < -UNCERTAINTY_TOL
    return phys, ent


def tmsv(r):
    """Two-mode squeezed vacuum with squeezing parameter ``r``."""
    return MomentMatrix(float(np.cosh(2 * r)), float(np.cosh(2 * r)),
                        float(np.sinh(2 * r)), -float(np.sinh(2 * r)))


def from_purity_correlation(p, k):
    """Symmetric channel with ``sqrt(n^2 - c^2) = p`` and ``1/(n - c) = k``."""
    if not (p >= 1 and k > 0):
        raise InvalidParameters(f"need p >= 1 and k > 0 (p={p}, k={k})")
    n = 0.5 * (1.0 / k + p * p * k)
    c = 0.5 * (p * p * k - 1.0 / k)
    if c < 0:
        raise InvalidParameters(f"correlation would be negative (c={c:.6g})")
    mm = MomentMatrix.symmetric(n, c)
    if not check_uncertainty(mm):
        raise InvalidParameters("resulting moments violate the uncertainty principle")
    return mm


def _local_normalizer(block):
    # symplectic S with S @ block @ S.T = sqrt(det block) * I
    det = np.linalg.det(block)
    if not det > 1e-12:
        raise DegenerateBlock(f"local block is singular (det={det:.3e})")
    w, u = np.linalg.eigh(block)
    if np.linalg.det(u) < 0:
        u[:, 0] = -u[:, 0]
    nu = np.sqrt(det)
    # block = u diag(w) u.T with w0 * w1 = nu**2
    return np.diag([np.sqrt(nu / w[0]), np.sqrt(nu / w[1])]) @ u.T, nu


@dataclass(frozen=True)
class LocalTransform:
    """Per-mode symplectic maps with ``(S1 (+) S2) raw (S1 (+) S2).T = standard``."""

    s1: np.ndarray
    s2: np.ndarray

    def full(self):
        out = np.zeros((4, 4))
        out[:2, :2] = self.s1
        out[2:, 2:] = self.s2
        return out


def symplectic_invariants(moments):
    """``(det n-block, det m-block, det c-block, det M)``."""
    a = _as_array(moments)
    return (
        float(np.linalg.det(a[:2, :2])),
        float(np.linalg.det(a[2:, 2:])),
        float(np.linalg.det(a[:2, 2:])),
        float(np.linalg.det(a)),
    )


def reduce_to_standard_form(raw):
    """Bring a raw moment matrix to standard form by local symplectic maps.

    Returns ``(MomentMatrix, LocalTransform)``. Correlations come out as
    ``c1 >= |c2|`` with ``sign(c2) = sign(det c-block)``; equal magnitudes
    with negative determinant give the canonical ``c1 = -c2``.
    """
    a = _as_array(raw)
    if not check_uncertainty(a):
        raise UnphysicalChannel("raw moments violate the uncertainty principle")
    standard = MomentMatrix(a[0, 0], a[2, 2], a[0, 2], a[1, 3])
    if np.array_equal(a, standard.matrix()):
        return standard, LocalTransform(np.eye(2), np.eye(2))

    s1, n = _local_normalizer(a[:2, :2])
    s2, m = _local_normalizer(a[2:, 2:])
    corr = s1 @ a[:2, 2:] @ s2.T
    u, sv, vt = np.linalg.svd(corr)
    # proper rotations only; push any reflection into the sign of c2
    sign = 1.0
    if np.linalg.det(u) < 0:
        u[:, 1] = -u[:, 1]
        sign = -sign
    if np.linalg.det(vt) < 0:
        vt[1, :] = -vt[1, :]
        sign = -sign
    s1 = u.T @ s1
    s2 = vt @ s2
    c1, c2 = sv[0], sign * sv[1]
    return MomentMatrix(float(n), float(m), float(c1), float(c2)), LocalTransform(s1, s2)


def read_raw_csv(path):
    """Raw moment matrix from 4 lines of 4 comma-separated decimals."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    try:
        a = np.array([[float(f) for f in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInput(f"{path}: non-numeric field ({exc})") from None
    if a.shape != (4, 4):
        raise InvalidInput(f"{path}: expected 4 rows of 4 fields, got shape {a.shape}")
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise InvalidInput(f"{path}: moment matrix is not symmetric")
    return a
