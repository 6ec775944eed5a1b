import numpy as np
import pytest

from etx.channel import check_uncertainty, is_gaussian_entangled
from etx.conditions import (
    EXCITED_ANGLES,
    GROUND_ANGLES,
    InitialAngles,
    exists_entangling_angles,
    initial_slope_probe,
    sufficient_condition_general,
    sufficient_condition_ground,
)
from etx.dynamics import basis_state, product_state
from etx.errors import InvalidParameters, NotCompletelyPositive, UnsupportedCorrelation
from etx.liouvillian import DissipatorSpec, build_kossakowski, cp_bound_closed, is_completely_positive

VACUUM = DissipatorSpec(1.0, 1.0, 0.0, 0.0)
FIG2A = DissipatorSpec.symmetric(2.4, 1.58)


# --- general condition ---

def test_ground_angles_entangle_fig2_drive():
    holds, lhs, rhs = sufficient_condition_general(FIG2A, GROUND_ANGLES)
    assert holds
    # u^H A u = (n - 1)/2 at theta = pi/2, and rhs = c^2 / 4
    assert lhs == pytest.approx(1.4 ** 2 / 4)
    assert rhs == pytest.approx(1.58 ** 2 / 4)


@pytest.mark.parametrize("c", np.linspace(0.0, np.sqrt(2.4 ** 2 - 1), 12))
def test_excited_angles_never_hold_inside_cp(c):
    res = sufficient_condition_general(DissipatorSpec.symmetric(2.4, c), EXCITED_ANGLES)
    assert not res.holds
    assert (res.lhs < res.rhs) == (c > 2.4 + 1)


def test_vacuum_never_holds():
    for t in np.linspace(0, np.pi, 7):
        res = sufficient_condition_general(VACUUM, InitialAngles(t, 0.3 * t))
        assert not res.holds
        assert res.rhs == 0.0


def test_margin_sign():
    res = sufficient_condition_general(FIG2A, GROUND_ANGLES)
    assert res.margin > 0
    assert res.margin == res.rhs - res.lhs


def test_general_requires_cp():
    with pytest.raises(NotCompletelyPositive):
        sufficient_condition_general(DissipatorSpec.symmetric(2.4, 2.3), GROUND_ANGLES)


# --- ground closed form ---

def test_ground_examples():
    assert sufficient_condition_ground(FIG2A)
    assert not sufficient_condition_ground(DissipatorSpec.symmetric(2.4, 1.40))
    assert sufficient_condition_ground(DissipatorSpec.symmetric(1.0, 0.1, m=3.0))


def test_ground_needs_antisymmetric_correlation():
    with pytest.raises(UnsupportedCorrelation):
        sufficient_condition_ground(DissipatorSpec(2.4, 2.4, 1.5, -1.2))


def test_ground_matches_general_40_cubed():
    axis = np.linspace(1.0, 5.0, 40)
    caxis = np.linspace(0.0, 5.0, 40)
    checked = 0
    for n in axis:
        for m in axis:
            bound = cp_bound_closed(n, m)
            for c in caxis[caxis <= bound]:
                spec = DissipatorSpec.symmetric(n, c, m=m)
                assert sufficient_condition_general(spec, GROUND_ANGLES).holds == \
                    sufficient_condition_ground(spec)
                checked += 1
    assert checked > 20000


# --- angle search ---

def test_angle_search_examples():
    found, best = exists_entangling_angles(FIG2A)
    assert found
    assert sufficient_condition_general(FIG2A, best).holds
    assert not exists_entangling_angles(DissipatorSpec.symmetric(2.4, 1.3))[0]
    assert not exists_entangling_angles(VACUUM)[0]


def test_angle_search_grid_guard():
    with pytest.raises(InvalidParameters):
        exists_entangling_angles(FIG2A, grid=4)


def test_angles_iff_channel_entanglement():
    checked = 0
    for n in np.linspace(1.1, 4.0, 8):
        for m in (n, n + 0.7):
            bound = cp_bound_closed(n, m)
            for c in np.linspace(0.0, bound, 9):
                gap = c * c - (n - 1) * (m - 1)
                if abs(gap) < 1e-6:
                    continue
                spec = DissipatorSpec.symmetric(n, c, m=m)
                found, _ = exists_entangling_angles(spec, grid=16)
                assert found == is_gaussian_entangled(spec.channel)
                checked += 1
    assert checked > 100


def test_unequal_correlations_can_block_transfer():
    """With |c1| != |c2| an entangled drive need not admit entangling angles."""
    examples = []
    for c1 in np.linspace(0.2, 3.0, 15):
        for c2 in np.linspace(-3.0, 3.0, 31):
            if abs(abs(c1) - abs(c2)) < 1e-9:
                continue
            spec = DissipatorSpec(2.4, 2.4, c1, c2)
            if not (is_completely_positive(build_kossakowski(spec)) and check_uncertainty(spec.channel)):
                continue
            if is_gaussian_entangled(spec.channel) and not exists_entangling_angles(spec, grid=16)[0]:
                examples.append((c1, c2))
    assert examples


# --- slope probe ---

def test_slope_examples():
    assert initial_slope_probe(FIG2A, basis_state("gg")) < 0
    assert initial_slope_probe(FIG2A, basis_state("ee")) >= 0
    assert abs(initial_slope_probe(VACUUM, basis_state("gg"))) <= 1e-8


def test_ground_slope_value():
    # d lambda_min / d tau from |gg> is -(c - (n - 1)) / 2 for n = m
    slope = initial_slope_probe(FIG2A, basis_state("gg"))
    assert slope == pytest.approx(-(1.58 - 1.4) / 2, abs=1e-6)


def test_condition_implies_negative_slope():
    rng = np.random.default_rng(17)
    hits = 0
    for _ in range(800):
        n, m = rng.uniform(1.0, 4.0, size=2)
        c = rng.uniform(0, cp_bound_closed(n, m))
        spec = DissipatorSpec.symmetric(n, c, m=m)
        angles = InitialAngles(*rng.uniform(0, np.pi, size=2))
        res = sufficient_condition_general(spec, angles)
        if res.holds and res.margin > 1e-6:
            assert initial_slope_probe(spec, product_state(angles.theta, angles.phi)) < 0
            hits += 1
    assert hits > 25
