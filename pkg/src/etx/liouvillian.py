"""Kossakowski matrix and the effective two-qubit Liouvillian.

The generator is

    L(rho) = sum_ab D_ab (O_a rho O_b - 1/2 {O_b O_a, rho})

with ``O = (sx x 1, sy x 1, 1 x sx, 1 x sy)`` and ``D = [[A, C], [C^H, B]]``.
In the ``(e, g)`` single-qubit basis ``sx - i sy = 2 |g><e|``, so a vacuum
drive (``n = m = 1``, ``c = 0``) is independent amplitude damping at rates
``gamma1``, ``gamma2``.
"""

from dataclasses import dataclass

import numpy as np

from .channel import MomentMatrix
from .errors import InvalidParameters, NotCompletelyPositive
from .qmath import hermitian_eigenvalues, hermitize, vec

CP_TOL = 1e-10

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_I2 = np.eye(2, dtype=complex)
OPERATORS = (np.kron(SX, _I2), np.kron(SY, _I2), np.kron(_I2, SX), np.kron(_I2, SY))


@dataclass(frozen=True)
class DissipatorSpec:
    """Channel moments plus effective decay rates ``gamma_i = 2 Omega_i^2 / kappa``."""

    n: float
    m: float
    c1: float
    c2: float
    gamma1: float = 1.0
    gamma2: float = 1.0

    def __post_init__(self):
        vals = (self.n, self.m, self.c1, self.c2, self.gamma1, self.gamma2)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidParameters(f"non-finite parameter in {self}")
        if self.n < 0 or self.m < 0:
            raise InvalidParameters(f"local moments must be non-negative (n={self.n}, m={self.m})")
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise InvalidParameters(
                f"decay rates must be positive (gamma1={self.gamma1}, gamma2={self.gamma2})"
            )

    @classmethod
    def symmetric(cls, n, c, gamma=1.0, m=None, gamma2=None):
        """``c1 = -c2 = c``; ``m`` and ``gamma2`` default to ``n`` and ``gamma``."""
        return cls(
            float(n), float(n if m is None else m), float(c), -float(c),
            float(gamma), float(gamma if gamma2 is None else gamma2),
        )

    @classmethod
    def from_channel(cls, channel, gamma1=1.0, gamma2=1.0):
        return cls(channel.n, channel.m, channel.c1, channel.c2, float(gamma1), float(gamma2))

    @property
    def channel(self):
        return MomentMatrix(self.n, self.m, self.c1, self.c2)

    @property
    def c(self):
        return self.channel.c


@dataclass(frozen=True)
class KossakowskiBlocks:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def matrix(self):
        """Assembled 4x4 Kossakowski matrix, Hermitian-symmetrized."""
        d = np.block([[self.a, self.c], [self.c.conj().T, self.b]])
        return hermitize(d)


def build_kossakowski(spec):
    g1, g2 = spec.gamma1, spec.gamma2
    a = g1 / 4 * np.array([[spec.n, 1j], [-1j, spec.n]])
    b = g2 / 4 * np.array([[spec.m, 1j], [-1j, spec.m]])
    c = np.sqrt(g1 * g2) / 4 * np.diag([spec.c1, spec.c2]).astype(complex)
    return KossakowskiBlocks(a, b, c)


def kossakowski_min_eigenvalue(blocks):
    return float(hermitian_eigenvalues(blocks.matrix())[0])


def _cp_floor(blocks, tol):
    # relative to the matrix scale so physical rates (~1e7 s^-1) don't trip on rounding
    w = hermitian_eigenvalues(blocks.matrix())
    return float(w[0]), -tol * max(1.0, float(np.max(np.abs(w))))


def is_completely_positive(blocks, tol=CP_TOL):
    lam, floor = _cp_floor(blocks, tol)
    return lam >= floor


def cp_bound_closed(n, m):
    """Largest ``c`` (with ``c1 = -c2 = c``) keeping the map CP; 0 outside ``n, m >= 1``."""
    if n < 1 or m < 1:
        return 0.0
    return float(np.sqrt(min((m - 1) * (n + 1), (m + 1) * (n - 1))))


def require_cp(spec, tol=CP_TOL):
    lam, floor = _cp_floor(build_kossakowski(spec), tol)
    if lam < floor:
        raise NotCompletelyPositive(
            f"Kossakowski matrix has eigenvalue {lam:.3e} < 0 "
            f"(c^2 <= min((m-1)(n+1), (m+1)(n-1)) violated for n={spec.n}, m={spec.m}, "
            f"c1={spec.c1}, c2={spec.c2})"
        )


def _superoperator(d):
    ident = np.eye(4, dtype=complex)
    out = np.zeros((16, 16), dtype=complex)
    for i, oa in enumerate(OPERATORS):
        for j, ob in enumerate(OPERATORS):
            coef = d[i, j]
            if coef == 0:
                continue
            prod = ob @ oa
            out += coef * (
                np.kron(ob.T, oa) - 0.5 * np.kron(ident, prod) - 0.5 * np.kron(prod.T, ident)
            )
    return out


def assemble_superoperator(spec, check=True):
    """16x16 matrix of the generator acting on column-stacked ``rho``."""
    if check:
        require_cp(spec)
    return _superoperator(build_kossakowski(spec).matrix())


def apply_generator(spec, rho):
    """``L(rho)`` straight from the operator sum."""
    d = build_kossakowski(spec).matrix()
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for i, oa in enumerate(OPERATORS):
        for j, ob in enumerate(OPERATORS):
            prod = ob @ oa
            out += d[i, j] * (oa @ rho @ ob - 0.5 * (prod @ rho + rho @ prod))
    return out


def apply_superoperator(superop, rho):
    return (superop @ vec(rho)).reshape(4, 4, order="F")


# Index pairs (row, col) of the populations/double-coherence ("X") sector.
X_SECTOR = ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1))


def x_sector_mask():
    """Boolean mask over vec indices belonging to the X sector."""
    mask = np.zeros(16, dtype=bool)
    for r, c in X_SECTOR:
        mask[c * 4 + r] = True
    return mask
