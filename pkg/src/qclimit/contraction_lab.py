"""Numerical experiments on the large-k limit of the 1D coherent family.

The contracted generators are X_c = X/k and P_c = P/k, so [X_c, P_c] = i/k^2
and 1/k^2 plays the role of an effective Planck constant.  A contracted label
(p_c, x_c) is represented by the coherent state at the physical label
(k p_c, k x_c); expectation values of the contracted quadratures then sit at
the contracted label for every k, while overlaps between distinct labels decay
like exp(-k^2 d^2/4) with d^2 the squared label separation.  The sweep below
measures that decay on the Fock backend against the closed form and writes the
records to CSV for inspection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass

import numpy as np

from qclimit.hilbert import (
    FockSpace,
    StateVector,
    build_fock_space,
    coherent_overlap_formula,
    coherent_state,
    matrix_element,
    overlap,
)

CSV_COLUMNS = (
    "k",
    "hbar",
    "pair_id",
    "overlap_abs",
    "overlap_phase",
    "predicted_abs",
    "predicted_phase",
    "abs_err",
    "phase_err",
    "backend",
    "cutoff",
)


def hbar_effective(k: float) -> float:
    if not k >= 1.0:
        raise ValueError(f"contraction parameter must satisfy k >= 1, got {k}")
    return 1.0 / (k * k)


def required_cutoff(k: float, labels, base: int = 64) -> int:
    """Cutoff policy: four times the largest physical mean occupation 2 k^2 L^2,
    floored at `base`, where L^2 is the largest squared contracted label."""
    worst = max(p * p + x * x for p, x, _ in labels)
    return max(base, int(math.ceil(4.0 * k * k * worst)))


def rescaled_operators(space: FockSpace, k: float):
    """Contracted quadratures (X/k, P/k) as sparse matrices."""
    hbar_effective(k)
    return space.x_op() / k, space.p_op() / k


def relabel_coherent(space: FockSpace, k: float, p_c: float, x_c: float, theta: float = 0.0) -> StateVector:
    """Coherent state whose contracted expectation values sit at (p_c, x_c)."""
    hbar_effective(k)
    return coherent_state(space, k * p_c, k * x_c, theta)


def predicted_overlap(k: float, label1, label2) -> complex:
    """Contracted-label form of the overlap: Gaussian decay at rate k^2 d^2/4
    under a symplectic phase that grows like k^2."""
    p1, x1, t1 = label1
    p2, x2, t2 = label2
    d2 = (x1 - x2) ** 2 + (p1 - p2) ** 2
    phase = 0.5 * k * k * (x1 * p2 - p1 * x2) + (t2 - t1)
    return complex(math.exp(-0.25 * k * k * d2) * np.exp(1j * phase))


@dataclass(frozen=True)
class ContractionRunConfig:
    k_values: tuple
    pairs: tuple
    base_cutoff: int = 64
    fock_max_cutoff: int = 4096
    seed: int = 7

    def __post_init__(self):
        if not self.k_values:
            raise ValueError("need at least one k value")
        if any(not k >= 1.0 for k in self.k_values):
            raise ValueError("every k must satisfy k >= 1")
        if not self.pairs:
            raise ValueError("need at least one label pair")


@dataclass(frozen=True)
class DecayRecord:
    k: float
    hbar: float
    pair_id: int
    overlap_abs: float
    overlap_phase: float
    predicted_abs: float
    predicted_phase: float
    abs_err: float
    phase_err: float
    backend: str
    cutoff: int


def canonical_pair():
    """Unit label separation along x, both momenta zero: decay exp(-k^2/4)."""
    return ((0.0, 0.0, 0.0), (0.0, 1.0, 0.0))


def _wrapped_phase_error(measured: float, predicted: float) -> float:
    return abs((measured - predicted + math.pi) % (2.0 * math.pi) - math.pi)


def _record(k, pair_id, measured: complex, predicted: complex, backend: str, cutoff: int) -> DecayRecord:
    pm, pp = abs(predicted), float(np.angle(predicted))
    mm, mp = abs(measured), float(np.angle(measured))
    return DecayRecord(
        k=float(k),
        hbar=hbar_effective(k),
        pair_id=pair_id,
        overlap_abs=mm,
        overlap_phase=mp,
        predicted_abs=pm,
        predicted_phase=pp,
        abs_err=abs(mm - pm),
        phase_err=_wrapped_phase_error(mp, pp),
        backend=backend,
        cutoff=cutoff,
    )


def overlap_decay_sweep(config: ContractionRunConfig) -> list[DecayRecord]:
    """One closed-form record per (k, pair), plus a Fock record whenever the
    cutoff policy stays within the configured budget."""
    records = []
    for k in config.k_values:
        for pair_id, (l1, l2) in enumerate(config.pairs):
            predicted = predicted_overlap(k, l1, l2)
            closed = coherent_overlap_formula(
                k * l1[0], k * l1[1], l1[2], k * l2[0], k * l2[1], l2[2]
            )
            cutoff = required_cutoff(k, (l1, l2), base=config.base_cutoff)
            records.append(_record(k, pair_id, closed, predicted, "closed_form", cutoff))
            if cutoff <= config.fock_max_cutoff:
                space = build_fock_space(1, cutoff)
                s1 = relabel_coherent(space, k, l1[0], l1[1], l1[2])
                s2 = relabel_coherent(space, k, l2[0], l2[1], l2[2])
                records.append(_record(k, pair_id, overlap(s1, s2), predicted, "fock", cutoff))
    return records


def write_decay_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in records:
            row = asdict(r)
            writer.writerow(
                {
                    c: format(row[c], ".17g") if isinstance(row[c], float) else row[c]
                    for c in CSV_COLUMNS
                }
            )


def decay_slope(records, pair_id: int, backend: str = "fock") -> float:
    """Least-squares slope of log|overlap| against k^2 for one pair."""
    pts = [
        (r.k * r.k, math.log(r.overlap_abs))
        for r in records
        if r.pair_id == pair_id and r.backend == backend and r.overlap_abs > 0.0
    ]
    if len(pts) < 2:
        raise ValueError("need at least two usable records to fit a slope")
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def eigenvalue_residual(k: float, p_c: float, x_c: float, base_cutoff: int = 64) -> dict:
    """Residual of the relabeled state as an approximate X_c eigenvector.

    The exact value is sqrt(hbar_eff/2) = 1/(k sqrt(2)) for both quadratures,
    so the states localize on classical phase-space points as k grows.
    """
    cutoff = required_cutoff(k, ((p_c, x_c, 0.0),), base=base_cutoff)
    space = build_fock_space(1, cutoff)
    state = relabel_coherent(space, k, p_c, x_c)
    xc, pc = rescaled_operators(space, k)
    rx = float(np.linalg.norm(xc @ state.coefficients - x_c * state.coefficients))
    rp = float(np.linalg.norm(pc @ state.coefficients - p_c * state.coefficients))
    return {
        "k": float(k),
        "hbar": hbar_effective(k),
        "residual_x": rx,
        "residual_p": rp,
        "predicted": 1.0 / (k * math.sqrt(2.0)),
        "cutoff": cutoff,
    }


def contracted_expectations(space: FockSpace, k: float, p_c: float, x_c: float) -> dict:
    """Means and variances of the contracted quadratures in a relabeled state."""
    state = relabel_coherent(space, k, p_c, x_c)
    mean_x = matrix_element(space, "X", 1, state, state).real / k
    mean_p = matrix_element(space, "P", 1, state, state).real / k
    xc, pc = rescaled_operators(space, k)
    c = state.coefficients
    var_x = float(np.vdot(c, xc @ (xc @ c)).real) - mean_x**2
    var_p = float(np.vdot(c, pc @ (pc @ c)).real) - mean_p**2
    return {
        "mean_x": mean_x,
        "mean_p": mean_p,
        "var_x": var_x,
        "var_p": var_p,
        "hbar": hbar_effective(k),
    }


def gram_matrix(k: float, labels, base_cutoff: int = 64, fock_max_cutoff: int = 4096):
    """Gram matrices of the relabeled family: (closed form, Fock or None)."""
    n = len(labels)
    closed = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            closed[i, j] = predicted_overlap(k, labels[i], labels[j])
    cutoff = required_cutoff(k, labels, base=base_cutoff)
    if cutoff > fock_max_cutoff:
        return closed, None
    space = build_fock_space(1, cutoff)
    states = [relabel_coherent(space, k, p, x, t) for p, x, t in labels]
    fock = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            fock[i, j] = overlap(states[i], states[j])
    return closed, fock


def classicalization_report(config: ContractionRunConfig) -> dict:
    """Bundle the decay sweep, slope fits, and localization residuals."""
    records = overlap_decay_sweep(config)
    slopes = {}
    for pair_id, (l1, l2) in enumerate(config.pairs):
        d2 = (l1[0] - l2[0]) ** 2 + (l1[1] - l2[1]) ** 2
        backend = "fock" if any(
            r.pair_id == pair_id and r.backend == "fock" for r in records
        ) else "closed_form"
        slopes[pair_id] = {
            "fitted": decay_slope(records, pair_id, backend=backend),
            "predicted": -0.25 * d2,
            "backend": backend,
        }
    residuals = [
        eigenvalue_residual(k, 0.3, -0.2, base_cutoff=config.base_cutoff)
        for k in config.k_values
    ]
    return {
        "hbar_mapping": [{"k": float(k), "hbar": hbar_effective(k)} for k in config.k_values],
        "decay": [asdict(r) for r in records],
        "slopes": slopes,
        "localization": residuals,
    }
