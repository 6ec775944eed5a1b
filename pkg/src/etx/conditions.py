"""Analytic entanglement-transfer criteria.

The general sufficient condition compares ``(u^H A u)(v^H B^T v)`` with
``|u^H C v|^2`` for ``u = (cos 2 theta, -i)`` and ``v = (cos 2 phi, i)``.
Angle ``theta`` labels the initial qubit state ``cos(theta)|e> + sin(theta)|g>``
(see :func:`etx.dynamics.product_state`); ``theta = phi = pi/2`` is the ground
state, where the condition collapses to ``(n - 1)(m - 1) < c**2``, and
``theta = phi = 0`` the excited state, where it needs ``c > n + 1``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import negativity
from .errors import InvalidParameters, UnsupportedCorrelation
from .liouvillian import assemble_superoperator, build_kossakowski, require_cp
from .qmath import matrix_exponential, vec

IMAG_RESIDUE = 1e-12


@dataclass(frozen=True)
class InitialAngles:
    theta: float
    phi: float

    @property
    def u(self):
        return np.array([np.cos(2 * self.theta), -1j])

    @property
    def v(self):
        return np.array([np.cos(2 * self.phi), 1j])


GROUND_ANGLES = InitialAngles(np.pi / 2, np.pi / 2)
EXCITED_ANGLES = InitialAngles(0.0, 0.0)


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    lhs: float
    rhs: float

    @property
    def margin(self):
        """``rhs - lhs``; positive when the condition holds."""
        return self.rhs - self.lhs

    def __iter__(self):
        return iter((self.holds, self.lhs, self.rhs))


def _real(z, what):
    if abs(z.imag) > IMAG_RESIDUE * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def _quadratic_forms(blocks, angles):
    u, v = angles.u, angles.v
    ua = _real(u.conj() @ blocks.a @ u, "u^H A u")
    vb = _real(v.conj() @ blocks.b.T @ v, "v^H B^T v")
    ucv = u.conj() @ blocks.c @ v
    return ua * vb, float(abs(ucv) ** 2)


def sufficient_condition_general(spec, angles):
    require_cp(spec)
    lhs, rhs = _quadratic_forms(build_kossakowski(spec), angles)
    return ConditionResult(lhs < rhs, lhs, rhs)


def sufficient_condition_ground(spec):
    """``(n - 1)(m - 1) < c**2`` for ``c1 = -c2 = c``."""
    if spec.c1 != -spec.c2:
        raise UnsupportedCorrelation(
            f"closed form needs c1 = -c2 (got c1={spec.c1}, c2={spec.c2})"
        )
    return (spec.n - 1.0) * (spec.m - 1.0) < spec.c1 * spec.c1


def _margin_fn(blocks):
    def margin(theta, phi):
        lhs, rhs = _quadratic_forms(blocks, InitialAngles(theta, phi))
        return rhs - lhs

    return margin


def exists_entangling_angles(spec, grid=32, tol=1e-6):
    """Search ``[0, pi)^2`` for angles satisfying the sufficient condition.

    Returns ``(found, best_angles)``; ``best_angles`` maximizes ``rhs - lhs``.
    """
    if grid < 8:
        raise InvalidParameters(f"grid must be at least 8, got {grid}")
    require_cp(spec)
    margin = _margin_fn(build_kossakowski(spec))
    axis = np.arange(grid) * np.pi / grid
    values = np.array([[margin(t, p) for p in axis] for t in axis])
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    theta, phi, best = axis[i], axis[j], values[i, j]
    half = np.pi / grid

    while True:
        prev = best
        res = minimize_scalar(lambda t: -margin(t, phi), bounds=(theta - half, theta + half),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > best:
            theta, best = float(res.x), -float(res.fun)
        res = minimize_scalar(lambda p: -margin(theta, p), bounds=(phi - half, phi + half),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > best:
            phi, best = float(res.x), -float(res.fun)
        if best - prev <= tol:
            break
    best_angles = InitialAngles(theta % np.pi, phi % np.pi)
    return bool(best > 0), best_angles


def initial_slope_probe(spec, rho0, h=1e-4):
    """Slope of the minimum partial-transpose eigenvalue at ``tau = 0``.

    One-sided differences at ``tau = h`` and ``2h`` combined by Richardson
    extrapolation. A negative slope from a separable state means entanglement
    appears immediately.
    """
    superop = assemble_superoperator(spec)
    rho0 = np.asarray(rho0, dtype=complex)
    v0 = vec(rho0)
    dt = h / spec.gamma1
    states = np.stack([
        rho0,
        (matrix_exponential(superop, dt) @ v0).reshape(4, 4, order="F"),
        (matrix_exponential(superop, 2 * dt) @ v0).reshape(4, 4, order="F"),
    ])
    _, lam = negativity(states)
    d1 = (lam[1] - lam[0]) / h
    d2 = (lam[2] - lam[0]) / (2 * h)
    return float(2 * d1 - d2)
