"""Cavity-QED parameters mapped onto the effective dissipator.

Each atom sits in a driven cavity (decay ``kappa``) with Rabi frequency
``Omega`` and spontaneous emission rate ``Gamma``. In the bad-cavity limit the
cavity is eliminated, giving ``gamma = 2 Omega^2 / kappa``. Spontaneous
emission keeps the same generator with dressed parameters

    gamma' = gamma (1 + 1/C),  n' = (n C + 1) / (1 + C),  c' = c C / (1 + C)

where ``C = 2 Omega^2 / (Gamma kappa)`` is the cooperativity.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .channel import MomentMatrix
from .errors import InvalidParameters, ZeroCooperativity
from .liouvillian import DissipatorSpec

WEAK_COUPLING_RATIO = 5.0
TWO_PI = 2 * np.pi
MHZ = 1e6


class RegimeWarning(UserWarning):
    """A validity heuristic of the elimination is not met, or a mapping is extrapolated."""


@dataclass(frozen=True)
class CqedParams:
    omega_a1: float
    omega_b2: float
    kappa: float
    gamma_sp: float
    channel: MomentMatrix = MomentMatrix(1.0, 1.0, 0.0, 0.0)
    bandwidth: float = float("inf")

    def __post_init__(self):
        if not (self.omega_a1 >= 0 and self.omega_b2 >= 0):
            raise InvalidParameters("Rabi frequencies must be non-negative")
        if not self.kappa > 0:
            raise InvalidParameters(f"kappa must be positive (got {self.kappa})")
        if not self.gamma_sp >= 0:
            raise InvalidParameters(f"spontaneous emission rate must be >= 0 (got {self.gamma_sp})")
        if not self.bandwidth > 0:
            raise InvalidParameters("drive bandwidth must be positive")

    def with_channel(self, channel):
        return replace(self, channel=channel)

    @property
    def weak_coupling(self):
        return self.kappa >= WEAK_COUPLING_RATIO * max(self.omega_a1, self.omega_b2)

    @property
    def broadband(self):
        return self.bandwidth >= self.kappa

    def regime_notes(self):
        notes = []
        if not self.weak_coupling:
            notes.append(
                f"kappa/Omega = {self.kappa / max(self.omega_a1, self.omega_b2):.3g} "
                f"< {WEAK_COUPLING_RATIO:g}: bad-cavity elimination is marginal"
            )
        if not self.broadband:
            notes.append(
                f"drive bandwidth/kappa = {self.bandwidth / self.kappa:.3g} < 1: "
                "broadband-drive assumption not met"
            )
        return notes


def cooperativity(omega, kappa, gamma_sp):
    """``2 Omega^2 / (Gamma kappa)``; infinite for ``Gamma = 0``."""
    if gamma_sp == 0:
        return float("inf")
    if omega == 0:
        raise ZeroCooperativity("Omega = 0 with Gamma > 0 gives zero cooperativity")
    return 2 * omega * omega / (gamma_sp * kappa)


def map_with_spontaneous_decay(params):
    """Dressed :class:`DissipatorSpec` and the (mean-Omega) cooperativity.

    Unequal Rabi frequencies use each arm's cooperativity for its rate and the
    mean-Omega cooperativity for the channel dressing. ``n != m`` dresses each
    mode separately. Both cases are extrapolations and emit
    :class:`RegimeWarning`.
    """
    for note in params.regime_notes():
        warnings.warn(note, RegimeWarning, stacklevel=2)
    ch = params.channel
    k, g_sp = params.kappa, params.gamma_sp
    gamma1 = 2 * params.omega_a1 ** 2 / k
    gamma2 = 2 * params.omega_b2 ** 2 / k
    if g_sp == 0:
        return DissipatorSpec(ch.n, ch.m, ch.c1, ch.c2, gamma1, gamma2), float("inf")

    if params.omega_a1 != params.omega_b2:
        warnings.warn("unequal Rabi frequencies: per-arm rates, mean-Omega channel dressing",
                      RegimeWarning, stacklevel=2)
    if ch.n != ch.m:
        warnings.warn("n != m: dressing applied per mode (extrapolated mapping)",
                      RegimeWarning, stacklevel=2)
    c1 = cooperativity(params.omega_a1, k, g_sp)
    c2 = cooperativity(params.omega_b2, k, g_sp)
    coop = cooperativity(0.5 * (params.omega_a1 + params.omega_b2), k, g_sp)
    shrink = coop / (1 + coop)
    spec = DissipatorSpec(
        (ch.n * coop + 1) / (1 + coop),
        (ch.m * coop + 1) / (1 + coop),
        ch.c1 * shrink,
        ch.c2 * shrink,
        gamma1 * (1 + 1 / c1),
        gamma2 * (1 + 1 / c2),
    )
    return spec, coop


def unmap_spontaneous_decay(spec, coop):
    """Invert the dressing for a common cooperativity ``coop``."""
    if np.isinf(coop):
        return spec
    grow = (1 + coop) / coop
    return DissipatorSpec(
        (spec.n * (1 + coop) - 1) / coop,
        (spec.m * (1 + coop) - 1) / coop,
        spec.c1 * grow,
        spec.c2 * grow,
        spec.gamma1 / (1 + 1 / coop),
        spec.gamma2 / (1 + 1 / coop),
    )


def ground_condition_invariance_check(params):
    """``(n' - 1) < c'`` agrees with ``(n - 1) < c`` for the undressed drive."""
    ch = params.channel
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        dressed, _ = map_with_spontaneous_decay(params)
    c, cd = abs(ch.c1), abs(dressed.c1)
    return ((dressed.n - 1) < cd) == ((ch.n - 1) < c)


def experimental_preset(gamma_sp=None, channel=None):
    """Drive bandwidth 2pi x 12 MHz, kappa = 6 x bandwidth, Omega/2pi = 20 MHz,
    Gamma/2pi = 3.5 MHz (angular frequencies in rad/s)."""
    bandwidth = TWO_PI * 12 * MHZ
    omega = TWO_PI * 20 * MHZ
    return CqedParams(
        omega_a1=omega,
        omega_b2=omega,
        kappa=6 * bandwidth,
        gamma_sp=TWO_PI * 3.5 * MHZ if gamma_sp is None else gamma_sp,
        channel=MomentMatrix(1.0, 1.0, 0.0, 0.0) if channel is None else channel,
        bandwidth=bandwidth,
    )


PRESETS = {"turchette-kimble": experimental_preset}
