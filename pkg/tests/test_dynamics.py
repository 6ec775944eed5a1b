import io

import numpy as np
import pytest

from etx.dynamics import (
    CSV_HEADER,
    BlochState,
    Trajectory,
    basis_state,
    bloch_trajectory,
    evolve_bloch,
    evolve_expm,
    evolve_rk,
    linearized_entropy,
    negativity,
    product_state,
    qubit_ket,
    read_trajectory_csv,
    state_defects,
    validate_state,
    verify_trajectory_rows,
)
from etx.errors import InvalidState, UnsupportedRegime
from etx.liouvillian import DissipatorSpec
from etx.steady import steady_state

FIG2 = [DissipatorSpec.symmetric(2.4, c) for c in (1.58, 1.804, 2.18)]


def bell():
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    return np.outer(psi, psi).astype(complex)


def assert_physical(traj):
    trace_err, herm, lam = state_defects(traj.states)
    assert np.max(trace_err) <= 1e-9
    assert np.max(herm) <= 1e-9
    assert np.min(lam) >= -1e-8


# --- observables ---

def test_bell_negativity():
    e, lam = negativity(bell())
    assert e == pytest.approx(1.0, abs=1e-12)
    assert lam == pytest.approx(-0.5, abs=1e-12)


def test_product_has_no_negativity():
    assert negativity(basis_state("gg"))[0] == 0.0


def test_werner_threshold():
    def werner(p):
        return p * bell() + (1 - p) * np.eye(4) / 4

    assert negativity(werner(1 / 3))[0] <= 1e-12
    assert negativity(werner(0.34))[0] > 0
    e, lam = negativity(werner(0.6))
    assert lam == pytest.approx((1 - 3 * 0.6) / 4, abs=1e-12)


def test_linearized_entropy_examples():
    assert linearized_entropy(basis_state("eg")) == 0.0
    assert linearized_entropy(bell()) == pytest.approx(0.0, abs=1e-12)
    assert linearized_entropy(np.eye(4) / 4) == pytest.approx(1.0)
    assert linearized_entropy(np.diag([0.5, 0.5, 0, 0])) == pytest.approx(2 / 3)


def test_negativity_works_on_stacks():
    stack = np.stack([bell(), basis_state("gg")])
    e, lam = negativity(stack)
    assert e.shape == (2,)
    assert e[0] == pytest.approx(1.0) and e[1] == 0.0


# --- states ---

def test_basis_and_product_states():
    assert np.array_equal(product_state(0.0, 0.0), basis_state("ee"))
    assert np.allclose(product_state(np.pi / 2, np.pi / 2), basis_state("gg"), atol=1e-15)
    assert np.allclose(qubit_ket(np.pi / 2), [0, 1], atol=1e-15)


def test_validate_state_rejects():
    with pytest.raises(InvalidState):
        validate_state(np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(InvalidState):
        validate_state(np.eye(4) / 2)
    with pytest.raises(InvalidState):
        basis_state("xx")


# --- propagators ---

def test_expm_at_zero_is_initial_state():
    rho0 = basis_state("gg")
    traj = evolve_expm(FIG2[0], rho0, [0.0, 1.0])
    assert np.array_equal(traj.states[0], rho0)


def test_vacuum_no_entanglement_from_excited():
    traj = evolve_rk(DissipatorSpec(1.0, 1.0, 0.0, 0.0), basis_state("ee"), 8.0, samples=41)
    assert np.all(traj.negativity == 0)
    assert np.all(np.diff(traj.states[:, 0, 0].real) < 0)
    assert traj.states[-1, 3, 3].real > 0.99


def test_transfer_window_from_ground():
    traj = evolve_rk(FIG2[0], basis_state("gg"), 10.0, samples=201)
    assert traj.negativity[0] == 0
    peak = int(np.argmax(traj.negativity))
    assert 0 < peak < len(traj) - 1
    assert traj.negativity[peak] > 0.02
    assert traj.negativity[-1] < 1e-3
    assert_physical(traj)


def test_late_entanglement_from_excited():
    traj = evolve_rk(FIG2[2], basis_state("ee"), 10.0, samples=201)
    zero = traj.negativity <= 1e-10
    assert zero[:10].all()
    assert traj.negativity[-1] > 0.01
    assert_physical(traj)


@pytest.mark.parametrize("spec", FIG2, ids=["c1.58", "c1.804", "c2.18"])
@pytest.mark.parametrize("init", ["gg", "ee"])
def test_three_way_agreement(spec, init):
    rho0 = basis_state(init)
    rk = evolve_rk(spec, rho0, 10.0, samples=101)
    ex = evolve_expm(spec, rho0, rk.times)
    bl = bloch_trajectory(spec.n, spec.c1, spec.gamma1, rho0, 10.0, samples=101)
    assert np.max(np.abs(rk.states - ex.states)) <= 1e-6
    assert np.max(np.abs(bl.states - rk.states)) <= 1e-8
    for t in (rk, ex, bl):
        assert_physical(t)


def test_bloch_symmetric_exchange_and_decoupled_case():
    times, bs = evolve_bloch(2.4, 0.0, 1.0, BlochState.from_rho(basis_state("gg")), 10.0, 51)
    arr = np.array([b.as_array() for b in bs])
    assert np.array_equal(arr[:, 1], arr[:, 2])
    assert np.all(arr[:, 3] == 0)
    # independent thermal qubits: excited population (n - 1) / (2n)
    pe = (2.4 - 1) / (2 * 2.4)
    assert arr[-1, 0] == pytest.approx(pe * pe, abs=1e-6)


def test_bloch_sign_convention():
    rho = steady_state(FIG2[2])
    b = BlochState.from_rho(rho)
    assert b.p_eegg == -rho[0, 3].real
    assert np.allclose(b.to_rho()[[0, 0, 3], [0, 3, 3]], rho[[0, 0, 3], [0, 3, 3]])


def test_bloch_unsupported_regimes():
    b0 = BlochState.from_rho(basis_state("gg"))
    with pytest.raises(UnsupportedRegime):
        evolve_bloch(2.4, 1.0, 1.0, b0, 1.0, m=2.0)
    with pytest.raises(UnsupportedRegime):
        evolve_bloch(2.4, 1.0, 1.0, b0, 1.0, gamma2=2.0)
    with pytest.raises(UnsupportedRegime):
        bloch_trajectory(2.4, 1.0, 1.0, product_state(0.3, 0.4), 1.0)


def test_long_time_matches_steady_state():
    for spec in FIG2:
        rho_ss = steady_state(spec)
        for init in ("gg", "ee"):
            late = evolve_expm(spec, basis_state(init), [200.0]).states[0]
            assert np.max(np.abs(late - rho_ss)) <= 1e-6


def test_tau_uses_gamma1():
    spec = DissipatorSpec(2.4, 2.4, 1.58, -1.58, 2.0, 2.0)
    traj = evolve_rk(spec, basis_state("gg"), 1.0, samples=5)
    assert np.allclose(traj.tau, 2.0 * traj.times)


def test_general_initial_state_physical():
    spec = DissipatorSpec(2.0, 3.0, 1.3, -1.1, 0.7, 1.4)
    traj = evolve_rk(spec, product_state(0.4, 1.1), 6.0, samples=61)
    ex = evolve_expm(spec, product_state(0.4, 1.1), traj.times)
    assert np.max(np.abs(traj.states - ex.states)) <= 1e-6
    assert_physical(traj)


# --- CSV ---

def test_csv_round_trip():
    traj = evolve_rk(FIG2[0], basis_state("gg"), 2.0, samples=11)
    buf = io.StringIO()
    traj.to_csv(buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert "\r" not in text
    cols = read_trajectory_csv(text)
    assert np.allclose(cols["tau"], traj.tau, rtol=1e-11)
    assert np.allclose(cols["negativity"], traj.negativity, atol=1e-12)
    assert np.allclose(cols["rho_eeee"], traj.states[:, 0, 0].real, atol=1e-12)
    assert verify_trajectory_rows(cols) == []


def test_trajectory_invariant_negativity_vs_eigenvalue():
    traj = evolve_rk(FIG2[2], basis_state("gg"), 5.0, samples=21)
    assert np.allclose(traj.negativity, np.maximum(0, -2 * traj.min_pt_eigenvalue), atol=1e-12)
    assert len({len(traj.times), len(traj.states), len(traj.negativity),
                len(traj.linearized_entropy)}) == 1


def test_verify_flags_bad_rows():
    traj = Trajectory.from_states([0.0], [basis_state("gg")])
    buf = io.StringIO()
    traj.to_csv(buf)
    cols = read_trajectory_csv(buf.getvalue())
    cols["negativity"] = np.array([0.5])
    assert verify_trajectory_rows(cols)
