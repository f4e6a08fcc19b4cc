import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.linalg import expm

from qclimit.coset_rep import WeylLabel, rotation_from_omega, weyl_compose_formula
from qclimit.hilbert import (
    FockSpace,
    GridSpace,
    TruncationGuardError,
    build_fock_space,
    coherent_overlap_formula,
    coherent_state,
    cross_validate_backends,
    fock_matrix_element_hp,
    fock_overlap_hp,
    grid_coherent_state,
    grid_delta_state,
    grid_position_action,
    grid_translate,
    matrix_element,
    matrix_element_formula,
    operator_commutator_check,
    overlap,
    projective_flow_check,
    rotation_unitary_apply,
    vacuum_state,
    weyl_unitary,
)

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# space construction
# ---------------------------------------------------------------------------


def test_build_validates_arguments():
    with pytest.raises(ValueError, match="modes"):
        build_fock_space(2, 8)
    with pytest.raises(ValueError, match="cutoff"):
        build_fock_space(1, 1)


def test_position_operator_small_cutoff_matrix():
    space = build_fock_space(1, 2)
    expected = np.array(
        [
            [0.0, 1.0, 0.0],
            [1.0, 0.0, SQRT2],
            [0.0, SQRT2, 0.0],
        ]
    ) / SQRT2
    assert np.allclose(space.mode_x(), expected, atol=1e-15)


def test_quadrature_hermiticity_and_edge_commutator():
    space = build_fock_space(1, 12)
    x = space.x_op().toarray()
    p = space.p_op().toarray()
    assert np.abs(x - x.conj().T).max() == 0.0
    assert np.abs(p - p.conj().T).max() < 1e-15
    comm = x @ p - p @ x
    inner = np.eye(space.dim, dtype=complex)
    # the truncation defect of [X, P] - iI is confined to the top level
    dev = comm - 1j * inner
    assert np.abs(dev[:-1, :-1]).max() < 1e-14
    assert abs(dev[-1, -1] + 1j * (space.cutoff + 1)) < 1e-12


def test_safe_mask_excludes_top_two_levels():
    space = build_fock_space(1, 4)
    mask = space.safe_mask(margin=2)
    assert mask.tolist() == [True, True, True, False, False]
    space3 = build_fock_space(3, 3)
    mask3 = space3.safe_mask(margin=2)
    occ = space3.occupations()
    assert mask3.sum() == 2**3
    assert (occ[mask3] <= 1).all()


def test_rotation_generator_needs_three_modes():
    with pytest.raises(ValueError, match="modes"):
        build_fock_space(1, 4).j_op(1, 2)
    with pytest.raises(ValueError, match="vanishes"):
        build_fock_space(3, 3).j_op(2, 2)


def test_rotation_generators_are_hermitian_and_kill_vacuum():
    space = build_fock_space(3, 4)
    vac = vacuum_state(space).coefficients
    for axis in (1, 2, 3):
        j = space.j_axis_op(axis).toarray()
        assert np.abs(j - j.conj().T).max() < 1e-14
        assert np.abs(j @ vac).max() == 0.0


# ---------------------------------------------------------------------------
# coherent states and overlaps
# ---------------------------------------------------------------------------


def test_coherent_state_coefficients_and_norm():
    space = build_fock_space(1, 40)
    s = coherent_state(space, p=1.0, x=0.5, theta=0.3)
    alpha = (0.5 + 1.0j) / SQRT2
    c0 = np.exp(0.3j) * math.exp(-0.5 * abs(alpha) ** 2)
    assert abs(s.coefficients[0] - c0) < 1e-15
    assert abs(s.coefficients[3] - c0 * alpha**3 / math.sqrt(6.0)) < 1e-15
    assert abs(s.norm() - 1.0) < 1e-12
    assert s.truncation_bound < 1e-12


def test_truncation_guard_reports_required_cutoff():
    space = build_fock_space(1, 16)
    with pytest.raises(TruncationGuardError) as err:
        coherent_state(space, p=3.0, x=3.0)
    assert err.value.required_cutoff == 36
    coherent_state(build_fock_space(1, 36), p=3.0, x=3.0)


def test_overlap_requires_matching_spaces():
    a = coherent_state(build_fock_space(1, 8), 0.0, 0.0)
    b = coherent_state(build_fock_space(1, 10), 0.0, 0.0)
    with pytest.raises(ValueError, match="different spaces"):
        overlap(a, b)
    g = grid_coherent_state(GridSpace(10.0, 160), 0.0, 0.0)
    with pytest.raises(ValueError, match="backend"):
        overlap(a, g)


def test_overlap_conjugate_symmetry_is_exact():
    space = build_fock_space(1, 32)
    rng = np.random.default_rng(5)
    for _ in range(20):
        p1, x1, p2, x2 = rng.uniform(-2, 2, size=4)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        s1 = coherent_state(space, p1, x1, t1)
        s2 = coherent_state(space, p2, x2, t2)
        assert overlap(s1, s2) == np.conj(overlap(s2, s1))


def test_overlap_matches_closed_form_moderate_labels():
    space = build_fock_space(1, 48)
    rng = np.random.default_rng(12)
    for _ in range(50):
        p1, x1, p2, x2 = rng.uniform(-2, 2, size=4)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        got = overlap(coherent_state(space, p1, x1, t1), coherent_state(space, p2, x2, t2))
        want = coherent_overlap_formula(p1, x1, t1, p2, x2, t2)
        assert abs(got - want) < 1e-12


def test_unit_label_separation_overlap_value():
    # |<0,0|0,2>| for x-separation 2 must be exp(-1)
    space = build_fock_space(1, 32)
    got = overlap(coherent_state(space, 0.0, 0.0), coherent_state(space, 0.0, 2.0))
    assert abs(abs(got) - math.exp(-1.0)) < 1e-13
    assert abs(got.imag) < 1e-15


def test_overlap_phase_tracks_theta_difference():
    space = build_fock_space(1, 16)
    s1 = coherent_state(space, 0.3, 0.1, theta=0.25)
    s2 = coherent_state(space, 0.3, 0.1, theta=1.0)
    got = overlap(s1, s2)
    assert abs(got - np.exp(0.75j)) < 1e-12


def test_high_precision_sum_agrees_with_closed_form_at_far_corner():
    # the smallest overlap on the [-3, 3] label grid, where float64 summation
    # loses digits to cancellation
    got = fock_overlap_hp(3.0, 3.0, 0.0, -3.0, -3.0, 0.0, cutoff=64)
    want = coherent_overlap_formula(3.0, 3.0, 0.0, -3.0, -3.0, 0.0)
    assert abs(want) == pytest.approx(math.exp(-18.0), rel=1e-12)
    assert abs(got - want) / abs(want) < 1e-10


def test_float64_overlap_stays_near_high_precision_sum():
    space = build_fock_space(1, 64)
    got = overlap(coherent_state(space, 3.0, 3.0), coherent_state(space, -3.0, -3.0))
    hp = fock_overlap_hp(3.0, 3.0, 0.0, -3.0, -3.0, 0.0, cutoff=64)
    assert abs(got - hp) / abs(hp) < 1e-4


def test_three_mode_overlap_matches_closed_form():
    p1 = np.array([1.5, -1.2, 0.7])
    x1 = np.array([0.3, 1.5, -0.9])
    p2 = np.array([-1.0, 0.4, 1.5])
    x2 = np.array([1.1, -1.5, 0.2])
    got = fock_overlap_hp(p1, x1, 0.4, p2, x2, -0.2, cutoff=16)
    want = coherent_overlap_formula(p1, x1, 0.4, p2, x2, -0.2)
    assert abs(got - want) / abs(want) < 1e-8
    space = build_fock_space(3, 16)
    direct = overlap(coherent_state(space, p1, x1, 0.4), coherent_state(space, p2, x2, -0.2))
    assert abs(direct - want) / abs(want) < 1e-9


# ---------------------------------------------------------------------------
# matrix elements
# ---------------------------------------------------------------------------


def test_matrix_elements_match_closed_form():
    space = build_fock_space(1, 48)
    rng = np.random.default_rng(21)
    for _ in range(30):
        p1, x1, p2, x2 = rng.uniform(-2, 2, size=4)
        s1 = coherent_state(space, p1, x1)
        s2 = coherent_state(space, p2, x2)
        for kind in ("X", "P"):
            got = matrix_element(space, kind, 1, s1, s2)
            want = matrix_element_formula(kind, 1, p1, x1, 0.0, p2, x2, 0.0)
            assert abs(got - want) < 1e-12


def test_diagonal_expectations_recover_labels():
    space = build_fock_space(1, 48)
    for p, x in ((0.0, 0.0), (1.5, -3.0), (3.0, 3.0), (-2.25, 0.75)):
        s = coherent_state(space, p, x)
        assert abs(matrix_element(space, "X", 1, s, s) - x) < 1e-10
        assert abs(matrix_element(space, "P", 1, s, s) - p) < 1e-10


def test_matrix_element_high_precision_at_far_corner():
    for kind in ("X", "P"):
        got = fock_matrix_element_hp(kind, 3.0, 3.0, 0.0, -3.0, -1.5, 0.0, cutoff=64)
        want = matrix_element_formula(kind, 1, 3.0, 3.0, 0.0, -3.0, -1.5, 0.0)
        assert abs(got - want) / abs(want) < 1e-10


def test_three_mode_matrix_elements_touch_only_their_axis():
    space = build_fock_space(3, 10)
    p = np.array([0.4, -0.3, 0.2])
    x = np.array([-0.1, 0.5, 0.3])
    s = coherent_state(space, p, x)
    for axis in (1, 2, 3):
        assert abs(matrix_element(space, "X", axis, s, s) - x[axis - 1]) < 1e-10
        assert abs(matrix_element(space, "P", axis, s, s) - p[axis - 1]) < 1e-10


# ---------------------------------------------------------------------------
# Weyl unitaries
# ---------------------------------------------------------------------------


def test_weyl_unitary_forms_agree_and_make_coherent_states():
    space = build_fock_space(1, 64)
    vac = vacuum_state(space)
    rng = np.random.default_rng(33)
    for _ in range(10):
        p, x = rng.uniform(-2, 2, size=2)
        theta = rng.uniform(-np.pi, np.pi)
        fact = weyl_unitary(space, p, x, theta, form="factored").apply(vac)
        single = weyl_unitary(space, p, x, theta, form="single").apply(vac)
        target = coherent_state(space, p, x, theta)
        assert np.abs(fact.coefficients - single.coefficients).max() < 1e-12
        assert np.abs(fact.coefficients - target.coefficients).max() < 1e-12


def test_weyl_unitary_is_unitary():
    space = build_fock_space(1, 32)
    u = weyl_unitary(space, 1.2, -0.7, 0.5)
    m = u.matrix()
    assert np.abs(m @ m.conj().T - np.eye(space.dim)).max() < 1e-12
    ud = u.dagger()
    assert np.abs(ud.matrix() - m.conj().T).max() == 0.0


def test_weyl_group_law_on_vacuum():
    space = build_fock_space(1, 64)
    vac = vacuum_state(space)
    rng = np.random.default_rng(40)
    for _ in range(10):
        p1, x1, p2, x2 = rng.uniform(-1.5, 1.5, size=4)
        t1, t2 = rng.uniform(-1.0, 1.0, size=2)
        seq = weyl_unitary(space, p1, x1, t1).apply(weyl_unitary(space, p2, x2, t2).apply(vac))
        theta = t1 + t2 - 0.5 * (x1 * p2 - p1 * x2)
        direct = weyl_unitary(space, p1 + p2, x1 + x2, theta).apply(vac)
        assert np.abs(seq.coefficients - direct.coefficients).max() < 1e-12


def test_weyl_group_law_matches_coset_composition():
    space = build_fock_space(3, 20)
    vac = vacuum_state(space)
    w1 = WeylLabel(p=[0.5, -0.2, 0.1], x=[0.3, 0.4, -0.6], theta=0.7)
    w2 = WeylLabel(p=[-0.3, 0.2, 0.4], x=[0.1, -0.5, 0.2], theta=-0.4)
    seq = weyl_unitary(space, w1.p, w1.x, w1.theta).apply(
        weyl_unitary(space, w2.p, w2.x, w2.theta).apply(vac)
    )
    w12 = weyl_compose_formula(w1, w2, kind="phase")
    direct = weyl_unitary(space, w12.p, w12.x, w12.theta).apply(vac)
    assert np.abs(seq.coefficients - direct.coefficients).max() < 1e-10


def test_three_mode_apply_matches_kron_matrix():
    space = build_fock_space(3, 3)
    u = weyl_unitary(space, [0.3, -0.2, 0.5], [0.1, 0.4, -0.3], 0.2)
    rng = np.random.default_rng(8)
    c = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    from qclimit.hilbert import StateVector

    s = StateVector("fock", space, c)
    got = u.apply(s).coefficients
    want = u.matrix() @ c
    assert np.abs(got - want).max() < 1e-12


# ---------------------------------------------------------------------------
# rotations
# ---------------------------------------------------------------------------


def test_rotation_fixes_vacuum_and_preserves_norm():
    space = build_fock_space(3, 8)
    vac = vacuum_state(space)
    rot = rotation_unitary_apply(space, [0.4, -0.7, 1.1], vac)
    assert np.abs(rot.coefficients - vac.coefficients).max() < 1e-12
    s = coherent_state(space, [0.5, 0.2, -0.3], [0.1, -0.4, 0.6])
    rs = rotation_unitary_apply(space, [0.4, -0.7, 1.1], s)
    assert abs(rs.norm() - s.norm()) < 1e-12


def test_rotation_maps_coherent_to_rotated_labels():
    space = build_fock_space(3, 16)
    rng = np.random.default_rng(17)
    for _ in range(5):
        omega = rng.uniform(-1.0, 1.0, size=3)
        p = rng.uniform(-0.8, 0.8, size=3)
        x = rng.uniform(-0.8, 0.8, size=3)
        rot = rotation_from_omega(omega)
        got = rotation_unitary_apply(space, omega, coherent_state(space, p, x))
        want = coherent_state(space, rot @ p, rot @ x)
        assert np.abs(got.coefficients - want.coefficients).max() < 1e-7


def test_rotation_preserves_overlaps():
    space = build_fock_space(3, 16)
    omega = [0.3, 0.9, -0.5]
    s1 = coherent_state(space, [0.4, 0.0, -0.2], [0.1, 0.3, 0.0])
    s2 = coherent_state(space, [-0.1, 0.5, 0.2], [0.6, -0.2, 0.1])
    before = overlap(s1, s2)
    after = overlap(
        rotation_unitary_apply(space, omega, s1), rotation_unitary_apply(space, omega, s2)
    )
    assert abs(before - after) < 1e-10


# ---------------------------------------------------------------------------
# bracket realization
# ---------------------------------------------------------------------------


def test_operator_brackets_match_structure_constants():
    space = build_fock_space(3, 10)
    report = operator_commutator_check(space)
    assert report.clean
    assert report.max_deviation < 1e-10
    assert len(report.per_bracket) == 45


def test_operator_bracket_check_flags_wrong_table():
    from qclimit.lie_core import build_standard_algebra, make_table

    space = build_fock_space(3, 6)
    good = build_standard_algebra("HR3")
    broken = {}
    for (a, b), terms in good.entries.items():
        if a < b:
            if good.generators[a].name == "X1" and good.generators[b].name == "P1":
                terms = ((good.dimension - 1, 2.0, terms[0][2]),)
            broken[(a, b)] = terms
    table = make_table("broken", good.generators, broken)
    report = operator_commutator_check(space, table)
    assert report.max_deviation > 0.5


# ---------------------------------------------------------------------------
# grid backend
# ---------------------------------------------------------------------------


def test_grid_space_validation():
    with pytest.raises(ValueError, match="even"):
        GridSpace(10.0, 15)
    with pytest.raises(ValueError, match="positive"):
        GridSpace(-1.0, 16)


def test_grid_coherent_norm_and_guards():
    grid = GridSpace(10.0, 160)
    s = grid_coherent_state(grid, p=1.0, x=2.0, theta=0.4)
    assert abs(s.norm() - 1.0) < 1e-9
    with pytest.raises(ValueError, match="box edge"):
        grid_coherent_state(grid, p=0.0, x=5.5)
    with pytest.raises(ValueError, match="band edge"):
        grid_coherent_state(grid, p=21.0, x=0.0)


def test_grid_overlap_matches_closed_form():
    grid = GridSpace(10.0, 160)
    rng = np.random.default_rng(29)
    for _ in range(30):
        p1, x1, p2, x2 = rng.uniform(-2, 2, size=4)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        got = overlap(
            grid_coherent_state(grid, p1, x1, t1), grid_coherent_state(grid, p2, x2, t2)
        )
        want = coherent_overlap_formula(p1, x1, t1, p2, x2, t2)
        assert abs(got - want) < 1e-9


def test_grid_position_action_is_diagonal_phase():
    grid = GridSpace(10.0, 160)
    factor = grid_position_action(grid, p=1.5, x_index=40, theta=0.3)
    y = grid.positions[40]
    assert abs(factor - np.exp(1j * (1.5 * y + 0.3))) < 1e-15
    assert abs(abs(factor) - 1.0) < 1e-15
    with pytest.raises(ValueError, match="outside"):
        grid_delta_state(grid, 160)


def test_grid_translation_shifts_labels_with_half_phase():
    grid = GridSpace(10.0, 160)
    p, x, theta, shift = 1.2, -0.5, 0.3, 1.75
    moved = grid_translate(grid, grid_coherent_state(grid, p, x, theta), shift)
    want = grid_coherent_state(grid, p, x + shift, theta - 0.5 * p * shift)
    assert np.abs(moved.coefficients - want.coefficients).max() < 1e-9


def test_backend_cross_validation():
    space = build_fock_space(1, 64)
    grid = GridSpace(10.0, 160)
    rng = np.random.default_rng(71)
    pairs = []
    for _ in range(100):
        p1, x1, p2, x2 = rng.uniform(-2, 2, size=4)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        pairs.append(((p1, x1, t1), (p2, x2, t2)))
    records = cross_validate_backends(pairs, space, grid)
    assert len(records) == 100
    assert max(r["abs_diff"] for r in records) < 1e-7


# ---------------------------------------------------------------------------
# projective flow
# ---------------------------------------------------------------------------


def _harmonic(space):
    x = space.x_op().toarray()
    p = space.p_op().toarray()
    return 0.5 * (x @ x + p @ p)


def test_flow_routes_agree_for_harmonic_hamiltonian():
    space = build_fock_space(1, 32)
    h = _harmonic(space)
    initial = coherent_state(space, 0.8, 0.6)
    report = projective_flow_check(space, h, initial, t_final=2.0, dt=1e-3)
    assert report.max_deviation < 1e-9
    assert report.norm_drift < 1e-10
    assert report.halving_deviation < 1e-9
    assert report.clean


def test_flow_matches_exact_propagator():
    space = build_fock_space(1, 24)
    h = _harmonic(space)
    initial = coherent_state(space, 0.5, -0.4)
    t_final, dt = 1.5, 1e-3

    def rhs(c):
        return -1j * (h @ c)

    from qclimit.hilbert import _rk4

    path = _rk4(rhs, initial.coefficients.astype(complex), t_final, dt, 1500)
    exact = expm(-1j * h * t_final) @ initial.coefficients
    assert np.abs(path[-1] - exact).max() < 1e-9


def test_flow_identity_hamiltonian_gives_global_phase():
    space = build_fock_space(1, 16)
    h = np.eye(space.dim)
    initial = coherent_state(space, 0.4, 0.3)
    report = projective_flow_check(space, h, initial, t_final=1.0, dt=1e-3)
    assert report.max_deviation < 1e-11
    # the exact orbit multiplies every coefficient by the same phase
    assert report.norm_drift < 1e-12


def test_flow_validates_inputs():
    space = build_fock_space(1, 8)
    bad = np.triu(np.ones((space.dim, space.dim)))
    initial = coherent_state(space, 0.1, 0.1)
    with pytest.raises(ValueError, match="Hermitian"):
        projective_flow_check(space, bad, initial, t_final=0.1)
    from qclimit.hilbert import StateVector

    unnorm = StateVector("fock", space, 2.0 * initial.coefficients)
    with pytest.raises(ValueError, match="normalized"):
        projective_flow_check(space, _harmonic(space), unnorm, t_final=0.1)
