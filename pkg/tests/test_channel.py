import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etx.channel import (
    MomentMatrix,
    check_uncertainty,
    from_purity_correlation,
    gaussian_entangled_batch,
    is_gaussian_entangled,
    read_raw_csv,
    reduce_to_standard_form,
    symplectic_invariants,
    tmsv,
)
from etx.errors import DegenerateBlock, InvalidInput, InvalidParameters, UnphysicalChannel

VACUUM = MomentMatrix(1.0, 1.0, 0.0, 0.0)


def rotation(a):
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


def random_local_symplectic(rng):
    """Rotation-squeeze-rotation on each mode (det 1 per block)."""
    blocks = []
    for _ in range(2):
        r = rng.uniform(-0.8, 0.8)
        blocks.append(rotation(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(r), np.exp(-r)])
                      @ rotation(rng.uniform(0, 2 * np.pi)))
    s = np.zeros((4, 4))
    s[:2, :2], s[2:, 2:] = blocks
    return s


def random_standard(rng):
    """Physical standard form with a strictly positive margin."""
    while True:
        n, m = rng.uniform(1.05, 5, size=2)
        bound = np.sqrt((n - 1) * (m - 1))
        c1 = rng.uniform(0, 2 * np.sqrt(n * m))
        c2 = rng.uniform(-c1, c1)
        mm = MomentMatrix(n, m, c1, c2)
        if check_uncertainty(mm) and abs(c1) > 1e-3 and abs(c2) > 1e-3 and bound >= 0:
            return mm


# --- uncertainty ---

def test_vacuum_saturates():
    assert check_uncertainty(VACUUM)


def test_pure_squeezed_is_physical():
    assert check_uncertainty(MomentMatrix.symmetric(2.4, 2.18))


def test_too_much_correlation_for_vacuum():
    assert not check_uncertainty(MomentMatrix.symmetric(1.0, 0.5))


def test_negative_moments_rejected():
    with pytest.raises(InvalidInput):
        MomentMatrix(-1.0, 1.0, 0.0, 0.0)


# --- Gaussian entanglement ---

def test_entangled_drive():
    assert is_gaussian_entangled(MomentMatrix.symmetric(2.4, 1.58))


def test_vacuum_separable():
    assert not is_gaussian_entangled(VACUUM)


def test_below_threshold_separable():
    assert not is_gaussian_entangled(MomentMatrix.symmetric(2.4, 1.39))


def test_unphysical_input_raises():
    with pytest.raises(UnphysicalChannel):
        is_gaussian_entangled(MomentMatrix.symmetric(1.0, 0.5))


def test_raw_array_matches_dataclass():
    mm = MomentMatrix.symmetric(2.4, 1.58)
    assert is_gaussian_entangled(mm.matrix()) == is_gaussian_entangled(mm)


def test_ppt_equivalence_50_cubed_grid():
    axis_nm = np.linspace(1.0, 5.0, 50)
    axis_c = np.linspace(0.0, 5.0, 50)
    n, m, c = (g.ravel() for g in np.meshgrid(axis_nm, axis_nm, axis_c, indexing="ij"))
    stack = np.zeros((n.size, 4, 4))
    stack[:, 0, 0] = stack[:, 1, 1] = n
    stack[:, 2, 2] = stack[:, 3, 3] = m
    stack[:, 0, 2] = stack[:, 2, 0] = c
    stack[:, 1, 3] = stack[:, 3, 1] = -c
    phys, ent = gaussian_entangled_batch(stack)
    closed = (n - 1) * (m - 1) < c * c
    gap = np.abs(c * c - (n - 1) * (m - 1))
    keep = phys & (gap > 1e-8)
    assert keep.sum() > 10000
    assert np.array_equal(ent[keep], closed[keep])


def test_scalar_api_on_subgrid():
    for n in np.linspace(1.0, 4.0, 7):
        for c in np.linspace(0.0, 4.0, 9):
            mm = MomentMatrix.symmetric(n, c)
            if check_uncertainty(mm):
                assert is_gaussian_entangled(mm) == ((n - 1) ** 2 < c * c)


# --- constructors ---

def test_tmsv_vacuum():
    assert tmsv(0.0) == VACUUM.__class__(1.0, 1.0, 0.0, -0.0)


def test_tmsv_fig_channel():
    r = np.arccosh(2.4) / 2
    mm = tmsv(r)
    assert mm.n == pytest.approx(2.4, abs=1e-12)
    assert round(mm.c, 2) == 2.18


@given(st.floats(0.0, 3.0))
def test_tmsv_pure(r):
    mm = tmsv(r)
    assert (mm.n - mm.c) * (mm.n + mm.c) == pytest.approx(1.0, abs=1e-12 * mm.n ** 2)
    assert check_uncertainty(mm)


@pytest.mark.parametrize("p,k,n,c", [(1, 2.5, 1.45, 1.05), (1.4, 2.5, 2.65, 2.25), (1, 1, 1, 0)])
def test_from_purity_correlation_examples(p, k, n, c):
    mm = from_purity_correlation(p, k)
    assert mm.n == pytest.approx(n, abs=1e-12)
    assert mm.c == pytest.approx(c, abs=1e-12)
    assert np.sqrt(mm.n ** 2 - mm.c ** 2) == pytest.approx(p, abs=1e-12)
    assert 1 / (mm.n - mm.c) == pytest.approx(k, abs=1e-12)


def test_from_purity_correlation_rejects_negative_c():
    with pytest.raises(InvalidParameters):
        from_purity_correlation(1.0, 0.5)


@given(st.floats(0.0, 2.5))
def test_tmsv_is_pure_member_of_family(r):
    a = from_purity_correlation(1.0, np.exp(2 * r))
    b = tmsv(r)
    for x, y in zip((a.n, a.m, a.c1, a.c2), (b.n, b.m, b.c1, b.c2)):
        assert x == pytest.approx(y, abs=1e-12 * max(1.0, b.n))


# --- standard form ---

def test_standard_input_unchanged():
    mm = MomentMatrix.symmetric(2.4, 1.58)
    out, tr = reduce_to_standard_form(mm.matrix())
    assert out == mm
    assert np.array_equal(tr.full(), np.eye(4))


def test_vacuum_reduces_to_vacuum():
    out, _ = reduce_to_standard_form(np.eye(4))
    assert out.n == out.m == 1.0
    assert out.c1 == out.c2 == 0.0


def test_degenerate_block():
    raw = np.zeros((4, 4))
    raw[2, 2] = raw[3, 3] = 1.0
    with pytest.raises((DegenerateBlock, UnphysicalChannel)):
        reduce_to_standard_form(raw)


def test_round_trip_and_invariants_1000():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        std = random_standard(rng)
        s = random_local_symplectic(rng)
        raw = s @ std.matrix() @ s.T
        out, tr = reduce_to_standard_form(raw)
        assert out.n == pytest.approx(std.n, abs=1e-8)
        assert out.m == pytest.approx(std.m, abs=1e-8)
        assert sorted([abs(out.c1), abs(out.c2)]) == pytest.approx(
            sorted([abs(std.c1), abs(std.c2)]), abs=1e-8)
        assert np.allclose(symplectic_invariants(raw), symplectic_invariants(out), atol=1e-9,
                           rtol=1e-9)
        full = tr.full()
        assert np.allclose(full @ raw @ full.T, out.matrix(), atol=1e-9)
        assert is_gaussian_entangled(raw) == is_gaussian_entangled(out)


def test_read_raw_csv(tmp_path):
    path = tmp_path / "raw.csv"
    mm = MomentMatrix.symmetric(2.4, 1.58).matrix()
    path.write_text("\n".join(",".join(f"{x:.12g}" for x in row) for row in mm) + "\n")
    assert np.allclose(read_raw_csv(path), mm)


def test_read_raw_csv_bad_shape(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("1,0,0\n0,1,0\n0,0,1\n")
    with pytest.raises(InvalidInput):
        read_raw_csv(path)
