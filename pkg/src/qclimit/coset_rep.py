"""Matrix realizations of the two coset spaces carrying the symmetry action.

Phase-space points (p, x, theta) ride in homogeneous 8-vectors
(p1 p2 p3, x1 x2 x3, theta, 1); configuration points (x, theta) in 5-vectors
(x1 x2 x3, theta, 1).  Group elements are square matrices with bottom row
(0, ..., 0, 1); algebra elements have an all-zero bottom row.  The rescaled
(contracted) action takes k in [1, inf], with k = math.inf meaning the exact
limit where the theta coupling is deleted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

KIND_DIMS = {"phase": 8, "config": 5}

ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class WeylLabel:
    """Group-element label (p, x, theta) of the translation sector."""

    p: np.ndarray
    x: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(3))
        object.__setattr__(self, "theta", float(self.theta))

    def inverse(self) -> "WeylLabel":
        return WeylLabel(-self.p, -self.x, -self.theta)

    def to_json_dict(self) -> dict:
        return {"p": list(self.p), "x": list(self.x), "theta": self.theta}

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeylLabel":
        return cls(np.array(data["p"]), np.array(data["x"]), data["theta"])


@dataclass(frozen=True)
class AlgebraParams:
    """Algebra-element parameters (omega, pbar, xbar, thetabar).

    omega holds the 3 independent entries (w23, w31, w12) of the
    antisymmetric rotation matrix; see :func:`omega_matrix`.
    """

    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    pbar: np.ndarray = field(default_factory=lambda: np.zeros(3))
    xbar: np.ndarray = field(default_factory=lambda: np.zeros(3))
    thetabar: float = 0.0

    def __post_init__(self):
        for name in ("omega", "pbar", "xbar"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))
        object.__setattr__(self, "thetabar", float(self.thetabar))

    def to_json_dict(self) -> dict:
        return {
            "omega": list(self.omega),
            "pbar": list(self.pbar),
            "xbar": list(self.xbar),
            "thetabar": self.thetabar,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AlgebraParams":
        return cls(
            np.array(data.get("omega", [0.0] * 3)),
            np.array(data.get("pbar", [0.0] * 3)),
            np.array(data.get("xbar", [0.0] * 3)),
            data.get("thetabar", 0.0),
        )


@dataclass(frozen=True)
class CosetMatrix:
    kind: str
    entries: np.ndarray

    def __post_init__(self):
        if self.kind not in KIND_DIMS:
            raise ValueError(f"unknown coset kind {self.kind!r}")
        m = np.asarray(self.entries, dtype=float)
        n = KIND_DIMS[self.kind]
        if m.shape != (n, n):
            raise ValueError(f"{self.kind} matrices are {n}x{n}, got {m.shape}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return KIND_DIMS[self.kind]


def omega_matrix(omega: np.ndarray) -> np.ndarray:
    """Antisymmetric 3x3 from the independent entries (w23, w31, w12)."""
    w1, w2, w3 = np.asarray(omega, dtype=float).reshape(3)
    return np.array(
        [
            [0.0, w3, -w2],
            [-w3, 0.0, w1],
            [w2, -w1, 0.0],
        ]
    )


def rotation_from_omega(omega: np.ndarray) -> np.ndarray:
    """Finite rotation exp(Omega(omega)); proper orthogonal for any omega."""
    return expm(omega_matrix(omega))


def _check_rotation(rotation: np.ndarray) -> np.ndarray:
    r = np.asarray(rotation, dtype=float)
    if r.shape != (3, 3):
        raise ValueError("rotation must be 3x3")
    if np.abs(r.T @ r - np.eye(3)).max() > ORTHO_TOL:
        raise ValueError("rotation is not orthogonal within 1e-12")
    if np.linalg.det(r) < 0:
        raise ValueError("rotation must have determinant +1")
    return r


# ---------------------------------------------------------------------------
# algebra elements and the infinitesimal action
# ---------------------------------------------------------------------------


def algebra_matrix(kind: str, params: AlgebraParams) -> CosetMatrix:
    """Matrix of the algebra element with the given parameters."""
    omega = omega_matrix(params.omega)
    if kind == "phase":
        m = np.zeros((8, 8))
        m[0:3, 0:3] = omega
        m[3:6, 3:6] = omega
        m[0:3, 7] = params.pbar
        m[3:6, 7] = params.xbar
        m[6, 0:3] = -0.5 * params.xbar
        m[6, 3:6] = 0.5 * params.pbar
        m[6, 7] = params.thetabar
    elif kind == "config":
        m = np.zeros((5, 5))
        m[0:3, 0:3] = omega
        m[0:3, 4] = params.xbar
        m[3, 0:3] = params.pbar
        m[3, 4] = params.thetabar
    else:
        raise ValueError(f"unknown coset kind {kind!r}")
    return CosetMatrix(kind, m)


def infinitesimal_action(kind: str, params: AlgebraParams, point) -> tuple:
    """Coordinate differentials of the algebra action at a coset point.

    Phase kind: point (p, x, theta) -> (dp, dx, dtheta) with
    dtheta = (pbar.x - xbar.p)/2 + thetabar.  Config kind: point (x, theta)
    -> (dx, dtheta) with dtheta = pbar.x + thetabar.
    """
    m = algebra_matrix(kind, params).entries
    vec = _point_vector(kind, point)
    out = m @ vec
    if kind == "phase":
        return out[0:3], out[3:6], float(out[6])
    return out[0:3], float(out[3])


def _point_vector(kind: str, point) -> np.ndarray:
    if kind == "phase":
        p, x, theta = point
        return np.concatenate(
            [np.asarray(p, float).reshape(3), np.asarray(x, float).reshape(3), [theta, 1.0]]
        )
    if kind == "config":
        x, theta = point
        return np.concatenate([np.asarray(x, float).reshape(3), [theta, 1.0]])
    raise ValueError(f"unknown coset kind {kind!r}")


def contracted_action(kind: str, params: AlgebraParams, point, k: float) -> tuple:
    """Differentials of the rescaled action at contraction parameter k.

    Labels and coordinates are the rescaled (classical) ones.  The theta
    coupling carries 1/(2 k^2) (phase) or 1/k^2 (config); k = math.inf
    deletes those terms exactly, leaving dtheta = thetabar.
    """
    if not (k >= 1):
        raise ValueError("contraction parameter k must be >= 1 (math.inf allowed)")
    inv_k2 = 0.0 if math.isinf(k) else 1.0 / (k * k)
    omega = omega_matrix(params.omega)
    if kind == "phase":
        p, x, theta = point
        p = np.asarray(p, float).reshape(3)
        x = np.asarray(x, float).reshape(3)
        dp = omega @ p + params.pbar
        dx = omega @ x + params.xbar
        dtheta = 0.5 * inv_k2 * (params.pbar @ x - params.xbar @ p) + params.thetabar
        return dp, dx, float(dtheta)
    if kind == "config":
        x, theta = point
        x = np.asarray(x, float).reshape(3)
        dx = omega @ x + params.xbar
        dtheta = inv_k2 * (params.pbar @ x) + params.thetabar
        return dx, float(dtheta)
    raise ValueError(f"unknown coset kind {kind!r}")


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------


def group_element(kind: str, w: WeylLabel, rotation: np.ndarray | None = None) -> CosetMatrix:
    """Finite element: translation factor for label w times the rotation."""
    r = np.eye(3) if rotation is None else _check_rotation(rotation)
    if kind == "phase":
        m = np.eye(8)
        m[0:3, 0:3] = r
        m[3:6, 3:6] = r
        m[0:3, 7] = w.p
        m[3:6, 7] = w.x
        m[6, 0:3] = -0.5 * w.x @ r
        m[6, 3:6] = 0.5 * w.p @ r
        m[6, 7] = w.theta
    elif kind == "config":
        m = np.eye(5)
        m[0:3, 0:3] = r
        m[0:3, 4] = w.x
        m[3, 0:3] = w.p @ r
        m[3, 4] = w.theta
    else:
        raise ValueError(f"unknown coset kind {kind!r}")
    return CosetMatrix(kind, m)


def is_pure_weyl(g: CosetMatrix, tol: float = 1e-12) -> bool:
    """True when the rotation block is the identity."""
    return np.abs(g.entries[0:3, 0:3] - np.eye(3)).max() <= tol


def extract_weyl_label(g: CosetMatrix) -> WeylLabel:
    """Label of a pure-Weyl group element (rotation block = identity)."""
    if not is_pure_weyl(g):
        raise ValueError("matrix has a nontrivial rotation block")
    m = g.entries
    if g.kind == "phase":
        return WeylLabel(m[0:3, 7], m[3:6, 7], m[6, 7])
    return WeylLabel(m[3, 0:3], m[0:3, 4], m[3, 4])


def compose(g1: CosetMatrix, g2: CosetMatrix) -> tuple[CosetMatrix, WeylLabel | None]:
    """Matrix product; the label is extracted when both factors are pure Weyl."""
    if g1.kind != g2.kind:
        raise ValueError(f"kind mismatch: {g1.kind} vs {g2.kind}")
    product = CosetMatrix(g1.kind, g1.entries @ g2.entries)
    label = None
    if is_pure_weyl(g1) and is_pure_weyl(g2):
        label = extract_weyl_label(product)
    return product, label


def weyl_compose_formula(w1: WeylLabel, w2: WeylLabel, kind: str = "phase") -> WeylLabel:
    """Closed-form composition law of the translation sector.

    Phase kind picks up the symplectic phase
    theta = theta1 + theta2 - (x1.p2 - p1.x2)/2; config kind is abelian in
    (x, theta) with the momenta adding.
    """
    if kind == "phase":
        theta = w1.theta + w2.theta - 0.5 * (w1.x @ w2.p - w1.p @ w2.x)
    elif kind == "config":
        theta = w1.theta + w2.theta + w1.p @ w2.x
    else:
        raise ValueError(f"unknown coset kind {kind!r}")
    return WeylLabel(w1.p + w2.p, w1.x + w2.x, theta)


def exp_algebra(kind: str, params: AlgebraParams) -> CosetMatrix:
    """Matrix exponential of an algebra element.

    Without a rotation part the generator matrix is nilpotent (A^2 = 0 for
    phase, A^3 = 0 for config) and the series is summed exactly; otherwise
    scaling-and-squaring is used.
    """
    a = algebra_matrix(kind, params).entries
    if np.all(params.omega == 0.0):
        n = a.shape[0]
        if kind == "phase":
            return CosetMatrix(kind, np.eye(n) + a)
        return CosetMatrix(kind, np.eye(n) + a + 0.5 * (a @ a))
    return CosetMatrix(kind, expm(a))
