"""Steady states of the effective Liouvillian and the steady-entanglement boundary.

The closed-form boundary is

    c_ss = (n g1 + m g2) / (2 sqrt(g1 g2)) * sqrt((mu - sqrt(nu)) / (n^2 m^2 - (m - n)^2))

with ``mu = (nm - 1)^2 + (nm + 1) - (n - m)^2`` and
``nu = 4nm + 4(nm - 1)^2 - 3(n - m)^2``. The frequently quoted variant with
``+ (m - n)^2`` in the denominator coincides with it only for ``n = m``;
:func:`c_ss_printed` evaluates that variant for comparison.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import negativity, validate_state
from .errors import DegenerateSteadyState, InvalidState, NonPhysicalInput, NoSignChange
from .liouvillian import DissipatorSpec, assemble_superoperator, cp_bound_closed
from .qmath import hermitize, kernel_vector, unvec

NEGATIVITY_THRESHOLD = 1e-10


def steady_state(spec, check=True):
    """Unique normalized kernel element of the generator.

    ``check=False`` skips the complete-positivity test, for continuing the
    boundary past the admissible range.
    """
    superop = assemble_superoperator(spec, check=check)
    v, kdim = kernel_vector(superop)
    if kdim > 1:
        raise DegenerateSteadyState(f"steady-state manifold has dimension {kdim}")
    rho = hermitize(unvec(v, 4))
    rho = rho / np.trace(rho).real
    return validate_state(rho)


def steady_negativity(spec, check=True):
    return float(negativity(steady_state(spec, check))[0])


def _mu_nu(n, m):
    mu = (n * m - 1) ** 2 + (n * m + 1) - (n - m) ** 2
    nu = 4 * n * m + 4 * (n * m - 1) ** 2 - 3 * (n - m) ** 2
    return mu, nu


def _boundary(n, m, gamma1, gamma2, denominator):
    if n < 1 or m < 1:
        raise NonPhysicalInput(f"boundary defined for n, m >= 1 (got n={n}, m={m})")
    if not (gamma1 > 0 and gamma2 > 0):
        raise NonPhysicalInput("decay rates must be positive")
    mu, nu = _mu_nu(n, m)
    ratio = (mu - np.sqrt(nu)) / denominator
    if ratio < 0:
        raise NonPhysicalInput(f"negative bracket {ratio:.3e} at n={n}, m={m}")
    return float((n * gamma1 + m * gamma2) / (2 * np.sqrt(gamma1 * gamma2)) * np.sqrt(ratio))


def c_ss_closed_form(n, m, gamma1=1.0, gamma2=1.0):
    """Correlation above which the steady state is entangled (``c1 = -c2``)."""
    return _boundary(n, m, gamma1, gamma2, n * n * m * m - (m - n) ** 2)


def c_ss_printed(n, m, gamma1=1.0, gamma2=1.0):
    """Magnitude of the ``+ (m - n)^2`` denominator variant; exact only for ``n = m``."""
    return _boundary(n, m, gamma1, gamma2, n * n * m * m + (m - n) ** 2)


def cqed_c_ss(n):
    """Steady-state boundary for identical arms, ``(sqrt((n^2-1)^2 + n^2) - 1) / n``."""
    if n < 1:
        raise NonPhysicalInput(f"n must be >= 1 (got {n})")
    return float((np.sqrt((n * n - 1) ** 2 + n * n) - 1) / n)


def _bisect(entangled, lo, hi, tol):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def c_ss_numeric(n, m, gamma1=1.0, gamma2=1.0, tol=1e-6):
    """Bisect ``c`` in ``[0, cp_bound]`` on steady-state negativity.

    Raises :class:`NoSignChange` (carrying ``cp_bound``) when the steady state
    is separable over the whole admissible range.
    """
    hi = cp_bound_closed(n, m)

    def entangled(c):
        spec = DissipatorSpec(n, m, c, -c, gamma1, gamma2)
        return steady_negativity(spec) > NEGATIVITY_THRESHOLD

    if hi <= 0 or not entangled(hi):
        raise NoSignChange(
            f"steady state separable for all c in [0, {hi:.6g}] (n={n}, m={m})", hi
        )
    return _bisect(entangled, 0.0, hi, tol)


def c_ss_continued(n, m, gamma1=1.0, gamma2=1.0, tol=1e-6, growth=1.05, steps=60):
    """Steady-state sign change of the generator's kernel without the CP restriction.

    Past ``cp_bound`` the generator no longer defines a CP map, but close to
    the bound its kernel is still a positive matrix and the negativity
    switches on at the same algebraic boundary. The bracket grows
    geometrically from ``cp_bound``; :class:`NoSignChange` is raised if the
    kernel stops being a state first.
    """

    def entangled(c):
        spec = DissipatorSpec(n, m, c, -c, gamma1, gamma2)
        return steady_negativity(spec, check=False) > NEGATIVITY_THRESHOLD

    lo = 0.0
    hi = max(cp_bound_closed(n, m), tol)
    try:
        for _ in range(steps):
            if entangled(hi):
                return _bisect(entangled, lo, hi, tol)
            lo, hi = hi, hi * growth
    except InvalidState:
        pass
    raise NoSignChange(f"no sign change before the kernel leaves the state space at "
                       f"c={hi:.6g} (n={n}, m={m})", hi)


@dataclass(frozen=True)
class BoundaryResult:
    """Closed form against bisection at one ``(n, m, gamma1, gamma2)``.

    ``within_cp`` is false when the sign change lies beyond the CP bound, in
    which case ``c_ss_numeric`` comes from :func:`c_ss_continued`.
    """

    n: float
    m: float
    gamma1: float
    gamma2: float
    c_ss_closed: float
    c_ss_numeric: float
    within_cp: bool

    @property
    def cp_bound(self):
        return cp_bound_closed(self.n, self.m)

    @property
    def agreement(self):
        return abs(self.c_ss_closed - self.c_ss_numeric)

    @property
    def consistent(self):
        """Agreement within 1e-3, and the CP flag on the right side of the bound."""
        side = (self.c_ss_closed <= self.cp_bound + 1e-3) if self.within_cp \
            else (self.c_ss_closed >= self.cp_bound - 1e-3)
        return self.agreement <= 1e-3 and side

    def row(self):
        return (self.n, self.m, self.gamma1, self.gamma2, self.c_ss_closed,
                self.c_ss_numeric, self.agreement)


BOUNDARY_HEADER = ("n", "m", "gamma1", "gamma2", "c_ss_closed", "c_ss_numeric", "abs_diff")


def boundary_result(n, m, gamma1=1.0, gamma2=1.0, tol=1e-6):
    closed = c_ss_closed_form(n, m, gamma1, gamma2)
    try:
        num, inside = c_ss_numeric(n, m, gamma1, gamma2, tol), True
    except NoSignChange:
        num, inside = c_ss_continued(n, m, gamma1, gamma2, tol), False
    return BoundaryResult(n, m, gamma1, gamma2, closed, num, inside)


def monotonicity_probe(n, gamma=1.0, points=25):
    """Pairs ``(c_a, c_b)`` on ``[c_ss, cp_bound]`` where steady negativity drops.

    An empty list means no violation at this resolution.
    """
    lo, hi = c_ss_closed_form(n, n, gamma, gamma), cp_bound_closed(n, n)
    cs = np.linspace(lo, hi, points)
    vals = [steady_negativity(DissipatorSpec.symmetric(n, c, gamma)) for c in cs]
    return [(cs[k], cs[k + 1]) for k in range(points - 1) if vals[k + 1] < vals[k] - 1e-12]
