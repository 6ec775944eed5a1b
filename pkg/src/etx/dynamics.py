"""Two-qubit evolution under the effective Liouvillian and its observables.

Three propagators are provided. :func:`evolve_rk` integrates the generator
with an adaptive Runge-Kutta pair, :func:`evolve_expm` applies
``exp(L t)`` directly, and :func:`evolve_bloch` integrates the four coupled
population/coherence equations valid for ``n = m``, ``gamma1 = gamma2``.

Times passed in are physical times ``t``; trajectories report the
dimensionless ``tau = gamma1 * t`` alongside.

The coherence variable of the Bloch equations is ``-rho_eegg`` in the
convention used here (``c1 = -c2 = c`` entering ``C = diag(c1, c2)``). The
two differ by a local ``sigma_z`` frame change, which leaves every
entanglement and purity measure unchanged.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, PositivityLoss, UnsupportedRegime
from .liouvillian import assemble_superoperator
from .qmath import hermitian_eigenvalues, hermiticity_defect, matrix_exponential, \
    partial_transpose, vec
from .rk import integrate

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-8
POSITIVITY_FAIL = 1e-6

BASIS = ("ee", "eg", "ge", "gg")

CSV_HEADER = (
    "tau", "negativity", "min_pt_eig", "linentropy",
    "rho_eeee", "rho_egeg", "rho_gege", "re_rho_eegg", "im_rho_eegg",
)


def basis_state(label):
    """Density matrix of a computational product state, e.g. ``"gg"``."""
    if label not in BASIS:
        raise InvalidState(f"unknown basis state {label!r}; expected one of {BASIS}")
    rho = np.zeros((4, 4), dtype=complex)
    k = BASIS.index(label)
    rho[k, k] = 1.0
    return rho


def qubit_ket(angle):
    """``cos(angle)|e> + sin(angle)|g>``."""
    return np.array([np.cos(angle), np.sin(angle)], dtype=complex)


def product_state(theta, phi):
    """Pure product state matching the rotation angles of the sufficient condition.

    ``theta = phi = pi/2`` gives ``|gg>``, ``theta = phi = 0`` gives ``|ee>``.
    """
    psi = np.kron(qubit_ket(theta), qubit_ket(phi))
    return np.outer(psi, psi.conj())


def validate_state(rho, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, pos_tol=POSITIVITY_TOL):
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidState(f"two-qubit state must be 4x4, got {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise InvalidState(f"trace {tr:.12g} differs from 1")
    defect = hermiticity_defect(rho)
    if defect > herm_tol:
        raise InvalidState(f"hermiticity defect {defect:.3e}")
    lam = hermitian_eigenvalues(rho, tol=herm_tol)[0]
    if lam < -pos_tol:
        raise InvalidState(f"negative eigenvalue {lam:.3e}")
    return np.array(rho, dtype=complex)


def state_defects(states):
    """Per-state ``(trace error, hermiticity defect, min eigenvalue)`` arrays."""
    states = np.asarray(states)
    tr = np.abs(np.trace(states, axis1=-2, axis2=-1) - 1)
    herm = np.max(np.abs(states - np.conj(np.swapaxes(states, -1, -2))), axis=(-2, -1))
    lam = hermitian_eigenvalues(states, tol=np.inf)[..., 0]
    return tr, herm, lam


def negativity(rho):
    """``(E_NPT, min PT eigenvalue)``; works on a single state or a stack."""
    pt = partial_transpose(np.asarray(rho))
    lam = hermitian_eigenvalues(pt, tol=1e-8)[..., 0]
    return np.maximum(0.0, -2.0 * lam), lam


def linearized_entropy(rho):
    """``4/3 (1 - Tr rho^2)``, clamped to ``[0, 1]``."""
    rho = np.asarray(rho)
    purity = np.einsum("...ij,...ji->...", rho, rho).real
    return np.clip(4.0 / 3.0 * (1.0 - purity), 0.0, 1.0)


@dataclass
class Trajectory:
    times: np.ndarray
    tau: np.ndarray
    states: np.ndarray
    negativity: np.ndarray
    min_pt_eigenvalue: np.ndarray
    linearized_entropy: np.ndarray

    @classmethod
    def from_states(cls, times, states, gamma1=1.0):
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=complex)
        neg, lam = negativity(states)
        return cls(times, gamma1 * times, states, neg, lam, linearized_entropy(states))

    def __len__(self):
        return len(self.times)

    def rows(self):
        for k in range(len(self)):
            r = self.states[k]
            yield (
                self.tau[k], self.negativity[k], self.min_pt_eigenvalue[k],
                self.linearized_entropy[k], r[0, 0].real, r[1, 1].real, r[2, 2].real,
                r[0, 3].real, r[0, 3].imag,
            )

    def to_csv(self, path_or_file):
        write_rows(path_or_file, CSV_HEADER, self.rows())


def fmt(x):
    """12 significant digits, no negative zero."""
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def write_rows(path_or_file, header, rows):
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            write_rows(fh, header, rows)
        return
    fh = path_or_file
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def read_trajectory_csv(path_or_text):
    """Parse a trajectory CSV into a dict of float arrays keyed by column."""
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, newline="")
    with fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise InvalidState(f"unexpected trajectory header {header}")
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    data = data.reshape(-1, len(CSV_HEADER))
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}


def verify_trajectory_rows(cols, tol=POSITIVITY_TOL):
    """Necessary state conditions checkable from the exported columns.

    Returns a list of ``(row index, message)`` for violations.
    """
    bad = []
    pee, peg, pge = cols["rho_eeee"], cols["rho_egeg"], cols["rho_gege"]
    pgg = 1.0 - pee - peg - pge
    x2 = cols["re_rho_eegg"] ** 2 + cols["im_rho_eegg"] ** 2
    for k in range(len(pee)):
        pops = (pee[k], peg[k], pge[k], pgg[k])
        if min(pops) < -tol or max(pops) > 1 + tol:
            bad.append((k, "population outside [0, 1]"))
        if pee[k] * pgg[k] - x2[k] < -tol:
            bad.append((k, "ee/gg principal minor negative"))
        expect = max(0.0, -2.0 * cols["min_pt_eig"][k])
        if abs(cols["negativity"][k] - expect) > 1e-10:
            bad.append((k, "negativity inconsistent with min PT eigenvalue"))
        if not -1e-12 <= cols["linentropy"][k] <= 1 + 1e-12:
            bad.append((k, "linearized entropy outside [0, 1]"))
    return bad


def _time_grid(t_max, samples):
    if not t_max > 0:
        raise InvalidState(f"t_max must be positive, got {t_max}")
    if samples < 2:
        raise InvalidState(f"need at least 2 samples, got {samples}")
    return np.linspace(0.0, float(t_max), int(samples))


def evolve_rk(spec, rho0, t_max, samples=201, rtol=1e-9, atol=1e-12, times=None):
    """Adaptive Runge-Kutta propagation on a uniform grid of ``samples`` points.

    An explicit ascending ``times`` array (starting at 0, ending at ``t_max``)
    replaces the uniform grid, e.g. to resolve short early windows.
    """
    superop = assemble_superoperator(spec)
    rho0 = validate_state(rho0)
    if times is None:
        times = _time_grid(t_max, samples)
    else:
        times = np.asarray(times, dtype=float)
        if times[0] != 0 or np.any(np.diff(times) <= 0) or times[-1] != t_max:
            raise InvalidState("times must ascend strictly from 0 to t_max")
    ys = integrate(lambda t, y: superop @ y, vec(rho0), times, rtol=rtol, atol=atol)
    states = ys.reshape(-1, 4, 4).transpose(0, 2, 1)
    traj = Trajectory.from_states(times, states, spec.gamma1)
    _, _, lam = state_defects(states)
    worst = int(np.argmin(lam))
    if lam[worst] < -POSITIVITY_FAIL:
        raise PositivityLoss(
            f"state at t={times[worst]:.6g} has eigenvalue {lam[worst]:.3e}"
        )
    return traj


def propagate_expm(superop, rho0, times):
    v0 = vec(rho0)
    out = np.empty((len(times), 4, 4), dtype=complex)
    for k, t in enumerate(times):
        if t == 0:
            out[k] = rho0
        else:
            out[k] = (matrix_exponential(superop, t) @ v0).reshape(4, 4, order="F")
    return out


def evolve_expm(spec, rho0, times):
    """Propagate with ``exp(L t)`` at every requested time."""
    superop = assemble_superoperator(spec)
    rho0 = validate_state(rho0)
    times = np.asarray(times, dtype=float)
    return Trajectory.from_states(times, propagate_expm(superop, rho0, times), spec.gamma1)


@dataclass(frozen=True)
class BlochState:
    """The four coupled elements; ``p_eegg`` is the Bloch-equation coherence."""

    p_eeee: float
    p_egeg: float
    p_gege: float
    p_eegg: float

    def as_array(self):
        return np.array([self.p_eeee, self.p_egeg, self.p_gege, self.p_eegg])

    @classmethod
    def from_rho(cls, rho):
        rho = np.asarray(rho)
        return cls(rho[0, 0].real, rho[1, 1].real, rho[2, 2].real, -rho[0, 3].real)

    def to_rho(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0], rho[1, 1], rho[2, 2] = self.p_eeee, self.p_egeg, self.p_gege
        rho[3, 3] = 1.0 - self.p_eeee - self.p_egeg - self.p_gege
        rho[0, 3] = rho[3, 0] = -self.p_eegg
        return rho


def bloch_rhs(n, c, gamma):
    """Right-hand side of the coupled equations with ``n^l_k = k/2 (n - 1) + l``."""

    def nlk(l, k):
        return 0.5 * k * (n - 1.0) + l

    n11, n01, n13, n12 = nlk(1, 1), nlk(0, 1), nlk(1, 3), nlk(1, 2)

    def rhs(t, y):
        pe, peg, pge, x = y
        return gamma * np.array([
            -2 * n11 * pe + n01 * (peg + pge) + c * x,
            n01 * (1 - pge) + pe - n13 * peg - c * x,
            n01 * (1 - peg) + pe - n13 * pge - c * x,
            -(n12 * x - c * (0.5 - pge - peg)),
        ])

    return rhs


def evolve_bloch(n, c, gamma, b0, t_max, samples=201, rtol=1e-11, atol=1e-13, m=None,
                 gamma2=None):
    """Integrate the coupled Bloch equations; returns ``(times, [BlochState])``.

    Only the symmetric regime is supported: passing ``m != n`` or
    ``gamma2 != gamma`` raises :class:`UnsupportedRegime`.
    """
    if m is not None and m != n:
        raise UnsupportedRegime(f"Bloch equations need n == m (got n={n}, m={m})")
    if gamma2 is not None and gamma2 != gamma:
        raise UnsupportedRegime(f"Bloch equations need equal rates (got {gamma}, {gamma2})")
    times = _time_grid(t_max, samples)
    ys = integrate(bloch_rhs(n, c, gamma), b0.as_array().astype(float), times,
                   rtol=rtol, atol=atol)
    return times, [BlochState(*map(float, y)) for y in ys]


def bloch_trajectory(n, c, gamma, rho0, t_max, samples=201):
    """Bloch fast path wrapped as a :class:`Trajectory` (X-shaped ``rho0`` only)."""
    rho0 = validate_state(rho0)
    mask = np.ones((4, 4), dtype=bool)
    for r, col in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0)):
        mask[r, col] = False
    if np.max(np.abs(rho0[mask]), initial=0.0) > 0 or abs(rho0[0, 3].imag) > 0:
        raise UnsupportedRegime("Bloch fast path needs an X-shaped state with real coherence")
    times, bs = evolve_bloch(n, c, gamma, BlochState.from_rho(rho0), t_max, samples)
    return Trajectory.from_states(times, [b.to_rho() for b in bs], gamma)

