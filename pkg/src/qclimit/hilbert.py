"""Unitary representation on a truncated Fock space, with a 1D position-grid
backend for cross-validation.

Conventions, fixed once and used everywhere:

- per mode, X = (a + a*)/sqrt(2), P = (a - a*)/(i sqrt(2)), so [X, P] = i
  away from the truncation edge and a coherent label (p, x) means
  alpha = (x + i p)/sqrt(2);
- the rotation generators are J_ij = X_j P_i - X_i P_j = i(a_i* a_j - a_j* a_i),
  matching the structure-constant tables of lie_core (and annihilating the
  vacuum);
- states carry the label phase: state(p, x, theta) = exp(i theta) D(alpha)|0>.

All tolerance-critical closed forms (overlap, matrix elements) have high
precision Fock-sum counterparts (suffix _hp) evaluated with mpmath, so that
formula checks are not polluted by float64 cancellation at small overlaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

SQRT2 = math.sqrt(2.0)

# modes are numbered 1..3; dual rotation axis a <-> pair (i, j)
_DUAL_PAIR = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


class TruncationGuardError(ValueError):
    """Raised when a coherent label would concentrate too close to the cutoff."""

    def __init__(self, mean_occupation: float, cutoff: int):
        self.required_cutoff = int(math.ceil(4.0 * mean_occupation))
        super().__init__(
            f"mean occupation {mean_occupation:.3f} exceeds cutoff/4 = {cutoff / 4:.3f}; "
            f"use cutoff >= {self.required_cutoff}"
        )


# ---------------------------------------------------------------------------
# Fock space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FockSpace:
    modes: int
    cutoff: int

    def __post_init__(self):
        if self.modes not in (1, 3):
            raise ValueError("modes must be 1 or 3")
        if self.cutoff < 2:
            raise ValueError("cutoff must be >= 2")

    @property
    def mode_dim(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.mode_dim**self.modes

    # -- per-mode building blocks ------------------------------------------

    def mode_annihilator(self) -> np.ndarray:
        n = self.mode_dim
        a = np.zeros((n, n))
        a[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
        return a

    def mode_x(self) -> np.ndarray:
        a = self.mode_annihilator()
        return (a + a.T) / SQRT2

    def mode_p(self) -> np.ndarray:
        a = self.mode_annihilator()
        return (a - a.T) / (1j * SQRT2)

    # -- full-space sparse operators ---------------------------------------

    def _lift(self, m: np.ndarray, mode: int) -> sp.csr_matrix:
        """Embed a one-mode matrix at the given mode (1-based) via Kronecker."""
        if not 1 <= mode <= self.modes:
            raise ValueError(f"mode {mode} out of range for {self.modes} modes")
        out = None
        for i in range(1, self.modes + 1):
            f = sp.csr_matrix(m) if i == mode else sp.identity(self.mode_dim, format="csr")
            out = f if out is None else sp.kron(out, f, format="csr")
        return out.astype(complex)

    def annihilator(self, mode: int = 1) -> sp.csr_matrix:
        return self._lift(self.mode_annihilator(), mode)

    def creator(self, mode: int = 1) -> sp.csr_matrix:
        return self.annihilator(mode).conj().T.tocsr()

    def x_op(self, mode: int = 1) -> sp.csr_matrix:
        return self._lift(self.mode_x(), mode)

    def p_op(self, mode: int = 1) -> sp.csr_matrix:
        return self._lift(self.mode_p(), mode)

    def j_op(self, i: int, j: int) -> sp.csr_matrix:
        """Rotation generator J_ij = X_j P_i - X_i P_j (two distinct modes)."""
        if self.modes != 3:
            raise ValueError("rotation generators need modes = 3")
        if i == j:
            raise ValueError("J_ii vanishes identically")
        return (self.x_op(j) @ self.p_op(i) - self.x_op(i) @ self.p_op(j)).tocsr()

    def j_axis_op(self, axis: int) -> sp.csr_matrix:
        i, j = _DUAL_PAIR[axis]
        return self.j_op(i, j)

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.dim, format="csr", dtype=complex)

    def occupations(self) -> np.ndarray:
        """Per-mode occupation numbers of every basis state, shape (dim, modes)."""
        idx = np.arange(self.dim)
        out = np.empty((self.dim, self.modes), dtype=int)
        for mode in range(self.modes - 1, -1, -1):
            out[:, mode] = idx % self.mode_dim
            idx = idx // self.mode_dim
        return out

    def safe_mask(self, margin: int = 2) -> np.ndarray:
        """Basis states keeping `margin` empty top levels in every mode."""
        return (self.occupations() <= self.cutoff - margin).all(axis=1)


def build_fock_space(modes: int, cutoff: int) -> FockSpace:
    """Construct the space and verify the ladder/quadrature sanity conditions."""
    space = FockSpace(modes, cutoff)
    a = space.mode_annihilator()
    comm = a @ a.T - a.T @ a
    # canonical up to the truncation edge, where the correction -(N+1)|N><N| lives
    edge = np.eye(space.mode_dim)
    edge[-1, -1] = -space.cutoff
    if np.abs(comm - edge).max() > 1e-12:
        raise AssertionError("ladder commutator defect outside the truncation edge")
    for op in (space.mode_x(), space.mode_p()):
        if np.abs(op - op.conj().T).max() > 1e-14:
            raise AssertionError("quadrature operator failed Hermiticity check")
    return space


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    backend: str
    space: object
    coefficients: np.ndarray
    label_p: np.ndarray | None = None
    label_x: np.ndarray | None = None
    label_theta: float | None = None
    truncation_bound: float = 0.0

    @property
    def is_coherent(self) -> bool:
        return self.label_p is not None

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def to_json_dict(self) -> dict:
        d = {
            "backend": self.backend,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }
        if self.is_coherent:
            d["labels"] = {
                "p": list(map(float, self.label_p)),
                "x": list(map(float, self.label_x)),
                "theta": float(self.label_theta),
            }
        return d


def _as_mode_vector(value, modes: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(value, dtype=float))
    if v.shape != (modes,):
        raise ValueError(f"label must have one entry per mode, got shape {v.shape}")
    return v


def vacuum_state(space: FockSpace) -> StateVector:
    c = np.zeros(space.dim, dtype=complex)
    c[0] = 1.0
    return StateVector("fock", space, c, np.zeros(space.modes), np.zeros(space.modes), 0.0)


def _mode_coherent_coeffs(alpha: complex, dim: int) -> np.ndarray:
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_state(space: FockSpace, p, x, theta: float = 0.0) -> StateVector:
    """exp(i theta) D(alpha)|0> with alpha_i = (x_i + i p_i)/sqrt(2) per mode.

    The truncation guard requires mean occupation |alpha|^2 <= cutoff/4 in
    every mode; the reported truncation bound is the missing tail norm.
    """
    p = _as_mode_vector(p, space.modes)
    x = _as_mode_vector(x, space.modes)
    alphas = (x + 1j * p) / SQRT2
    worst = float(np.max(np.abs(alphas) ** 2))
    if worst > space.cutoff / 4.0:
        raise TruncationGuardError(worst, space.cutoff)
    vec = None
    kept = 1.0
    for alpha in alphas:
        c = _mode_coherent_coeffs(complex(alpha), space.mode_dim)
        kept *= float(np.sum(np.abs(c) ** 2))
        vec = c if vec is None else np.kron(vec, c)
    vec = vec * np.exp(1j * theta)
    return StateVector("fock", space, vec, p, x, float(theta), truncation_bound=1.0 - kept)


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    if s1.backend != s2.backend:
        raise ValueError(f"backend mismatch: {s1.backend} vs {s2.backend}")
    if s1.space != s2.space:
        raise ValueError("states live on different spaces")
    return complex(np.vdot(s1.coefficients, s2.coefficients))


def coherent_overlap_formula(p1, x1, theta1, p2, x2, theta2) -> complex:
    """Closed form of <p1,x1,theta1|p2,x2,theta2>: a symplectic phase
    (x1.p2 - p1.x2)/2 on top of a Gaussian in the label separation."""
    p1, x1 = np.atleast_1d(np.asarray(p1, float)), np.atleast_1d(np.asarray(x1, float))
    p2, x2 = np.atleast_1d(np.asarray(p2, float)), np.atleast_1d(np.asarray(x2, float))
    phase = 0.5 * (x1 @ p2 - p1 @ x2) + (theta2 - theta1)
    decay = -0.25 * (np.sum((x1 - x2) ** 2) + np.sum((p1 - p2) ** 2))
    return complex(np.exp(decay) * np.exp(1j * phase))


def matrix_element_formula(kind: str, axis: int, p1, x1, theta1, p2, x2, theta2) -> complex:
    """Closed form of <s1|O|s2> for O = X_axis or P_axis between coherent states."""
    p1, x1 = np.atleast_1d(np.asarray(p1, float)), np.atleast_1d(np.asarray(x1, float))
    p2, x2 = np.atleast_1d(np.asarray(p2, float)), np.atleast_1d(np.asarray(x2, float))
    i = axis - 1
    if kind == "X":
        pref = 0.5 * ((x1[i] + x2[i]) - 1j * (p1[i] - p2[i]))
    elif kind == "P":
        pref = 0.5 * ((p1[i] + p2[i]) + 1j * (x1[i] - x2[i]))
    else:
        raise ValueError("kind must be 'X' or 'P'")
    return pref * coherent_overlap_formula(p1, x1, theta1, p2, x2, theta2)


def matrix_element(space: FockSpace, kind: str, axis: int, s1: StateVector, s2: StateVector) -> complex:
    if kind not in ("X", "P"):
        raise ValueError("kind must be 'X' or 'P'")
    op = space.x_op(axis) if kind == "X" else space.p_op(axis)
    return complex(np.vdot(s1.coefficients, op @ s2.coefficients))


# ---------------------------------------------------------------------------
# high-precision Fock sums (mpmath)
# ---------------------------------------------------------------------------


def _hp_mode_coeffs(alpha, dim: int) -> list:
    c = [mpmath.exp(-0.5 * abs(alpha) ** 2)]
    for n in range(1, dim):
        c.append(c[-1] * alpha / mpmath.sqrt(n))
    return c


def _hp_alpha(x: float, p: float):
    return (mpmath.mpf(float(x)) + 1j * mpmath.mpf(float(p))) / mpmath.sqrt(2)


def fock_overlap_hp(p1, x1, theta1, p2, x2, theta2, cutoff: int, dps: int = 30) -> complex:
    """Truncated Fock inner product summed at `dps` decimal digits.

    Factorizes over modes (exact for product states), so 3D sums cost three
    1D sums.
    """
    p1, x1 = np.atleast_1d(p1), np.atleast_1d(x1)
    p2, x2 = np.atleast_1d(p2), np.atleast_1d(x2)
    with mpmath.workdps(dps):
        total = mpmath.mpc(1)
        for i in range(len(p1)):
            c1 = _hp_mode_coeffs(_hp_alpha(x1[i], p1[i]), cutoff + 1)
            c2 = _hp_mode_coeffs(_hp_alpha(x2[i], p2[i]), cutoff + 1)
            total *= mpmath.fsum(
                (mpmath.conj(a) * b for a, b in zip(c1, c2)), absolute=False
            )
        total *= mpmath.exp(1j * (mpmath.mpf(float(theta2)) - mpmath.mpf(float(theta1))))
        return complex(total)


def fock_matrix_element_hp(
    kind: str, p1, x1, theta1, p2, x2, theta2, cutoff: int, dps: int = 30
) -> complex:
    """1D high-precision <s1|O|s2> with the ladder action applied exactly."""
    with mpmath.workdps(dps):
        c1 = _hp_mode_coeffs(_hp_alpha(float(x1), float(p1)), cutoff + 1)
        c2 = _hp_mode_coeffs(_hp_alpha(float(x2), float(p2)), cutoff + 1)
        lowered = [mpmath.sqrt(n + 1) * c2[n + 1] for n in range(cutoff)] + [mpmath.mpc(0)]
        raised = [mpmath.mpc(0)] + [mpmath.sqrt(n) * c2[n - 1] for n in range(1, cutoff + 1)]
        if kind == "X":
            oc2 = [(lo + ra) / mpmath.sqrt(2) for lo, ra in zip(lowered, raised)]
        elif kind == "P":
            oc2 = [(lo - ra) / (1j * mpmath.sqrt(2)) for lo, ra in zip(lowered, raised)]
        else:
            raise ValueError("kind must be 'X' or 'P'")
        total = mpmath.fsum((mpmath.conj(a) * b for a, b in zip(c1, oc2)), absolute=False)
        total *= mpmath.exp(1j * (mpmath.mpf(float(theta2)) - mpmath.mpf(float(theta1))))
        return complex(total)


# ---------------------------------------------------------------------------
# Weyl and rotation unitaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylOperator:
    """Product-form unitary: a global phase times one matrix per mode."""

    space: FockSpace
    phase: complex
    factors: tuple

    def apply(self, state: StateVector) -> StateVector:
        if state.backend != "fock" or state.space != self.space:
            raise ValueError("operator and state live on different spaces")
        c = state.coefficients
        n = self.space.mode_dim
        if self.space.modes == 1:
            out = self.factors[0] @ c
        else:
            t = c.reshape((n, n, n))
            for mode, f in enumerate(self.factors):
                t = np.moveaxis(np.tensordot(f, t, axes=([1], [mode])), 0, mode)
            out = t.reshape(-1)
        return StateVector("fock", self.space, self.phase * out)

    def matrix(self) -> np.ndarray:
        m = self.factors[0]
        for f in self.factors[1:]:
            m = np.kron(m, f)
        return self.phase * m

    def dagger(self) -> "WeylOperator":
        return WeylOperator(
            self.space,
            np.conj(self.phase),
            tuple(f.conj().T for f in self.factors),
        )


def weyl_unitary(space: FockSpace, p, x, theta: float = 0.0, form: str = "factored") -> WeylOperator:
    """U(p, x, theta) in product form.

    form='factored' multiplies exp(i x.p/2) exp(-i x.P) exp(i p.X) per mode;
    form='single' exponentiates i(p.X - x.P) in one step.  Both carry the
    global exp(i theta).  Agreement of the two forms is the standard
    Baker-Campbell-Hausdorff consistency check for the canonical pair.
    """
    p = _as_mode_vector(p, space.modes)
    x = _as_mode_vector(x, space.modes)
    xm, pm = space.mode_x(), space.mode_p()
    factors = []
    for i in range(space.modes):
        if form == "factored":
            f = (
                np.exp(0.5j * x[i] * p[i])
                * expm(-1j * x[i] * pm)
                @ expm(1j * p[i] * xm)
            )
        elif form == "single":
            f = expm(1j * (p[i] * xm - x[i] * pm))
        else:
            raise ValueError("form must be 'factored' or 'single'")
        factors.append(f)
    return WeylOperator(space, np.exp(1j * float(theta)), tuple(factors))


def rotation_unitary_apply(space: FockSpace, omega, state: StateVector) -> StateVector:
    """Apply exp(-i sum_a omega_a J_axis_a) to a state.

    Sends the coherent state at (p, x) to the one at (R p, R x) with
    R = exp(Omega(omega)) from coset_rep.rotation_from_omega.
    """
    omega = np.asarray(omega, dtype=float).reshape(3)
    gen = None
    for axis in (1, 2, 3):
        if omega[axis - 1] != 0.0:
            term = omega[axis - 1] * space.j_axis_op(axis)
            gen = term if gen is None else gen + term
    if gen is None:
        return state
    out = expm_multiply(-1j * gen.tocsc(), state.coefficients)
    return StateVector("fock", space, out)


# ---------------------------------------------------------------------------
# operator-realization check against the structure constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutatorCheckReport:
    max_deviation: float
    per_bracket: dict

    @property
    def clean(self) -> bool:
        return self.max_deviation < 1e-10


def operator_commutator_check(space: FockSpace, table=None) -> CommutatorCheckReport:
    """Deviation of every realized bracket from its structure-constant value,
    measured on the safe subspace (top two levels of each mode excluded)."""
    from qclimit.lie_core import build_standard_algebra

    if space.modes != 3:
        raise ValueError("the full bracket check needs modes = 3")
    if table is None:
        table = build_standard_algebra("HR3")

    ops = {}
    for axis, name in ((1, "J23"), (2, "J31"), (3, "J12")):
        ops[name] = space.j_axis_op(axis)
    for i in (1, 2, 3):
        ops[f"X{i}"] = space.x_op(i)
        ops[f"P{i}"] = space.p_op(i)
    ops["I"] = space.identity()

    mask = space.safe_mask(margin=2)
    names = [g.name for g in table.generators]
    worst = 0.0
    detail = {}
    for ia in range(len(names)):
        for ib in range(ia + 1, len(names)):
            a, b = ops[names[ia]], ops[names[ib]]
            delta = a @ b - b @ a
            for tgt, coeff, _ in table.entries.get((ia, ib), ()):
                delta = delta - 1j * coeff * ops[names[tgt]]
            dm = delta.toarray()[np.ix_(mask, mask)]
            dev = float(np.abs(dm).max()) if dm.size else 0.0
            detail[f"{names[ia]},{names[ib]}"] = dev
            worst = max(worst, dev)
    return CommutatorCheckReport(worst, detail)


# ---------------------------------------------------------------------------
# position-grid backend (1D)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpace:
    """Uniform 1D grid on [-extent, extent) with a spectral momentum action."""

    extent: float
    points: int

    def __post_init__(self):
        if self.points % 2 != 0 or self.points < 8:
            raise ValueError("points must be even and >= 8")
        if self.extent <= 0:
            raise ValueError("extent must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.points

    @property
    def positions(self) -> np.ndarray:
        return -self.extent + self.spacing * np.arange(self.points)

    @property
    def momentum_limit(self) -> float:
        return math.pi / self.spacing


def grid_coherent_state(grid: GridSpace, p: float, x: float, theta: float = 0.0) -> StateVector:
    """Sampled wavefunction pi^(-1/4) exp(-(y-x)^2/2 + i p y - i p x / 2).

    Guards keep five standard deviations of position inside the box and of
    momentum inside the spectral band, which bounds norm defects near 1e-12.
    """
    if abs(x) + 5.0 > grid.extent:
        raise ValueError(f"label x={x} too close to the box edge (extent {grid.extent})")
    if abs(p) + 5.0 > grid.momentum_limit:
        raise ValueError(f"label p={p} too close to the spectral band edge")
    y = grid.positions
    psi = np.pi**-0.25 * np.exp(-0.5 * (y - x) ** 2 + 1j * p * y - 0.5j * p * x + 1j * theta)
    coeff = psi * math.sqrt(grid.spacing)
    return StateVector(
        "grid", grid, coeff, np.atleast_1d(float(p)), np.atleast_1d(float(x)), float(theta)
    )


def grid_delta_state(grid: GridSpace, index: int) -> StateVector:
    if not 0 <= index < grid.points:
        raise ValueError(f"index {index} outside the {grid.points}-point grid")
    c = np.zeros(grid.points, dtype=complex)
    c[index] = 1.0
    return StateVector("grid", grid, c)


def grid_position_action(grid: GridSpace, p: float, x_index: int, theta: float = 0.0) -> complex:
    """Eigenvalue of the diagonal phase action exp(i(p X + theta)) on the
    delta vector at grid point x_index."""
    delta = grid_delta_state(grid, x_index)
    phased = np.exp(1j * (p * grid.positions + theta)) * delta.coefficients
    factor = complex(np.exp(1j * (p * grid.positions[x_index] + theta)))
    residual = np.abs(phased - factor * delta.coefficients).max()
    if residual > 1e-15:
        raise AssertionError("diagonal action failed to act as a pure scale")
    return factor


def grid_translate(grid: GridSpace, state: StateVector, shift: float) -> StateVector:
    """exp(-i shift P) via the spectral representation: psi(y) -> psi(y - shift)."""
    k = 2.0 * math.pi * np.fft.fftfreq(grid.points, d=grid.spacing)
    out = np.fft.ifft(np.fft.fft(state.coefficients) * np.exp(-1j * k * shift))
    return StateVector("grid", grid, out)


def cross_validate_backends(
    pairs, space: FockSpace, grid: GridSpace
) -> list[dict]:
    """Overlap of each 1D label pair on both backends, with the difference."""
    if space.modes != 1:
        raise ValueError("cross-validation is defined for the 1D backends")
    records = []
    for pair_id, (l1, l2) in enumerate(pairs):
        p1, x1, t1 = l1
        p2, x2, t2 = l2
        fock = overlap(coherent_state(space, p1, x1, t1), coherent_state(space, p2, x2, t2))
        gridv = overlap(grid_coherent_state(grid, p1, x1, t1), grid_coherent_state(grid, p2, x2, t2))
        records.append(
            {
                "pair_id": pair_id,
                "fock": fock,
                "grid": gridv,
                "abs_diff": abs(fock - gridv),
            }
        )
    return records


# ---------------------------------------------------------------------------
# projective flow
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowReport:
    max_deviation: float
    norm_drift: float
    halving_deviation: float
    steps: int
    dt: float

    @property
    def clean(self) -> bool:
        return self.max_deviation < 1e-6 and self.norm_drift < 1e-8


def _rk4(rhs, y0: np.ndarray, t_final: float, dt: float, sample_every: int):
    y = y0.copy()
    t = 0.0
    samples = [y.copy()]
    steps = int(round(t_final / dt))
    for step in range(1, steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        if step % sample_every == 0 or step == steps:
            samples.append(y.copy())
    return np.array(samples)


def projective_flow_check(
    space: FockSpace,
    hamiltonian,
    initial: StateVector,
    t_final: float = 10.0,
    dt: float = 1e-3,
    sample_every: int = 50,
) -> FlowReport:
    """Integrate the same ray flow two ways and compare.

    Route (a): the linear coefficient equation dc/dt = -i H c.  Route (b):
    real canonical equations for c = q + i p generated by the function
    (1/2) <phi(c)|H|phi(c)>, whose gradients are evaluated from the real and
    imaginary parts of H.  The two routes are algebraically identical flows,
    so their numerical trajectories must agree to integrator accuracy, and
    route (a) run at dt and dt/2 gives the step-halving convergence figure.
    """
    h = hamiltonian.toarray() if sp.issparse(hamiltonian) else np.asarray(hamiltonian)
    if np.abs(h - h.conj().T).max() > 1e-12:
        raise ValueError("hamiltonian must be Hermitian")
    c0 = initial.coefficients.astype(complex)
    if abs(np.linalg.norm(c0) - 1.0) > 1e-6:
        raise ValueError("initial state must be normalized")

    a_part = h.real
    b_part = h.imag

    def schroedinger(c):
        return -1j * (h @ c)

    def hamilton(y):
        n = y.size // 2
        q, pp = y[:n], y[n:]
        dq = a_part @ pp + b_part @ q
        dp = -(a_part @ q) + b_part @ pp
        return np.concatenate([dq, dp])

    path_a = _rk4(schroedinger, c0, t_final, dt, sample_every)
    y0 = np.concatenate([c0.real, c0.imag])
    path_b = _rk4(hamilton, y0, t_final, dt, sample_every)
    n = c0.size
    path_b_c = path_b[:, :n] + 1j * path_b[:, n:]

    deviation = float(np.abs(path_a - path_b_c).max())
    norms = np.linalg.norm(path_a, axis=1)
    drift = float(np.abs(norms - np.linalg.norm(c0)).max())
    path_half = _rk4(schroedinger, c0, t_final, dt / 2.0, 2 * sample_every)
    halving = float(np.abs(path_a - path_half).max())
    return FlowReport(deviation, drift, halving, int(round(t_final / dt)), dt)
