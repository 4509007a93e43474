import math

import numpy as np
import pytest

from cbpursuit import (
    BranchPhaseSystem,
    CBParams,
    InadmissibleEquilibriumError,
    ManifoldShapeState,
    branch_jacobian,
    circling_equilibrium,
    classify_stability_3agent,
    get_preset,
    manifold_shape_derivative,
    pure_shape_derivative,
    pure_shape_equilibria,
    rectilinear_equilibrium,
    shape_equilibrium_modes,
    state_from_manifold_shape,
    validate_graph,
    wrap_angle,
)
from cbpursuit.pureshape import PureShapeState

from util import draw_circling, draw_pure_shape, draw_rectilinear, random_graph


def _sorted(eigs):
    return np.sort_complex(np.asarray(eigs, dtype=complex))


# ---------------------------------------------------------------- residuals


def test_rectilinear_residual_oracle(rng):
    for _ in range(5):
        g = random_graph(rng)
        params = draw_rectilinear(rng, g)
        rep = rectilinear_equilibrium(params, g)
        assert rep.admissible, rep.reason
        rho = {arc: float(rng.uniform(0.5, 3.0)) for arc in g.arcs}
        mstate = ManifoldShapeState(dict(rep.theta), rho)
        rates = manifold_shape_derivative(mstate, g, params)
        for arc in g.arcs:
            td, rd = rates[arc]
            assert abs(td) < 1e-12
            assert abs(rd) < 1e-12


def test_circling_residual_oracle(rng):
    for _ in range(5):
        g = random_graph(rng)
        params = draw_circling(rng, g)
        rep = circling_equilibrium(params, g)
        assert rep.admissible, rep.reason
        rho_ref = float(rng.uniform(0.5, 3.0))
        rho = {arc: rho_ref * rep.rho_tilde[arc] for arc in g.arcs}
        mstate = ManifoldShapeState(dict(rep.theta), rho)
        rates = manifold_shape_derivative(mstate, g, params)
        for arc in g.arcs:
            td, rd = rates[arc]
            assert abs(td) < 1e-12
            assert abs(rd) < 1e-12


def test_pure_shape_residual_oracle(rng):
    for _ in range(5):
        g = random_graph(rng)
        params, reports = draw_pure_shape(rng, g)
        for rep in reports:
            pstate = PureShapeState(0.0, dict(rep.theta), dict(rep.rho_tilde))
            rates = pure_shape_derivative(pstate, g, params)
            for arc in g.arcs:
                assert abs(rates.theta_rates[arc]) < 1e-11
                assert abs(rates.rho_tilde_rates[arc]) < 1e-11
            assert rates.log_scale_rate == pytest.approx(
                rep.log_scale_rate, abs=1e-12
            )


def test_circling_geometry_common_circle():
    g = validate_graph([1, 2, 0])
    params = CBParams([math.pi / 3, math.pi / 4, 5 * math.pi / 12])
    rep = circling_equilibrium(params, g)
    assert rep.admissible
    rho_ref = 2.0
    rho = {arc: rho_ref * rep.rho_tilde[arc] for arc in g.arcs}
    state = state_from_manifold_shape(
        g, params, dict(rep.theta), rho,
        anchor_position=(0.3, -1.1), anchor_heading=(0.6, 0.8))
    center = state.agents[0].position + rep.circling_radius * rho_ref * state.agents[0].normal
    radii = [np.linalg.norm(a.position - center) for a in state.agents]
    assert radii == pytest.approx([abs(rep.circling_radius) * rho_ref] * 3, rel=1e-9)


# ------------------------------------------------------------ pinned values


def test_rectilinear_pinned_fig2a():
    doc = get_preset("fig2a")
    g = validate_graph([t - 1 for t in doc["targets"]])
    params = CBParams(doc["alpha"])
    rep = rectilinear_equilibrium(params, g)
    assert rep.admissible
    assert rep.relaxed_mod_pi is True
    # the second agent is flipped by pi, so the strict chain fails
    assert rep.strict_mod_2pi is False
    assert rep.rho_tilde is None
    assert rep.theta[(0, 1)] == pytest.approx(-2 * math.pi / 3)
    assert rep.theta[(1, 2)] == pytest.approx(math.pi / 3)
    assert rep.theta[(2, 0)] == pytest.approx(-2 * math.pi / 3)
    assert rep.theta[(3, 0)] == pytest.approx(-5 * math.pi / 6)


def test_circling_pinned_fig2b():
    doc = get_preset("fig2b")
    g = validate_graph([t - 1 for t in doc["targets"]])
    params = CBParams(doc["alpha"])
    rep = circling_equilibrium(params, g)
    assert rep.admissible
    assert rep.strict_mod_2pi is False  # bearings sum to pi, not 2 pi
    assert rep.theta[(0, 1)] == pytest.approx(2 * math.pi / 3)
    assert rep.theta[(3, 0)] == pytest.approx(5 * math.pi / 6)
    assert rep.rho_tilde[(0, 1)] == 1.0
    assert rep.rho_tilde[(3, 0)] == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-12)
    assert rep.circling_radius == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-12)


def test_pure_shape_enumeration_fig2c():
    doc = get_preset("fig2c")
    g = validate_graph([t - 1 for t in doc["targets"]])
    params = CBParams(doc["alpha"])
    reports = pure_shape_equilibria(params, g)
    assert [r.k for r in reports] == [0, 1, 2]

    # k = 0 puts tau on a cycle bearing, collapsing that margin
    assert not reports[0].admissible

    spiral = reports[1]
    assert spiral.admissible
    assert spiral.tau == pytest.approx(math.pi / 3, rel=1e-12)
    assert spiral.log_scale_rate == pytest.approx(1.5, abs=1e-12)
    for arc in g.cycle_arcs:
        assert abs(spiral.theta[arc]) == pytest.approx(math.pi)
    assert spiral.theta[(3, 0)] == pytest.approx(-11 * math.pi / 15)
    assert spiral.rho_tilde[(3, 0)] == pytest.approx(
        math.sin(math.pi / 15) / math.sin(math.pi / 3), rel=1e-12
    )

    # k = 2 has tau = 0 and reduces to the circling family
    still = reports[2]
    circ = circling_equilibrium(params, g)
    assert still.admissible and circ.admissible
    assert still.log_scale_rate == pytest.approx(0.0, abs=1e-12)
    for arc in g.arcs:
        assert still.theta[arc] == pytest.approx(circ.theta[arc], abs=1e-12)
        assert still.rho_tilde[arc] == pytest.approx(circ.rho_tilde[arc], rel=1e-12)


def test_pure_shape_candidate_count(rng):
    for _ in range(5):
        g = random_graph(rng)
        params = CBParams(rng.uniform(-math.pi, math.pi, g.n))
        reports = pure_shape_equilibria(params, g)
        m = len(g.cycle_members)
        assert len(reports) == m
        total = math.fsum(float(params.alpha[c]) for c in g.cycle_members)
        for k, rep in enumerate(reports):
            assert rep.tau == pytest.approx((total - k * math.pi) / m, abs=1e-12)


# -------------------------------------------------------------- rejections


def test_rectilinear_rejections():
    g = validate_graph([1, 2, 0])
    one_class = rectilinear_equilibrium(CBParams([0.4, 0.4, 0.4]), g)
    assert not one_class.admissible
    assert "orientation" in one_class.reason
    assert one_class.theta is None

    skew = rectilinear_equilibrium(CBParams([0.4, 0.9, 0.4]), g)
    assert not skew.admissible
    assert "congruent" in skew.reason


def test_rectilinear_strict_alternating_pair():
    g = validate_graph([1, 0])
    rep = rectilinear_equilibrium(CBParams([0.7, 0.7 + math.pi]), g)
    assert rep.admissible
    assert rep.strict_mod_2pi is True


def test_circling_rejections():
    pair = validate_graph([1, 0])
    mixed = circling_equilibrium(CBParams([math.pi / 3, -math.pi / 3]), pair)
    assert not mixed.admissible
    assert "sign" in mixed.reason

    tri = validate_graph([1, 2, 0])
    off_sum = circling_equilibrium(
        CBParams([math.pi / 3, math.pi / 3, math.pi / 4]), tri
    )
    assert not off_sum.admissible
    assert "sum" in off_sum.reason


# ---------------------------------------------------- branch flow stability


def test_branch_jacobian_matches_finite_differences(rng):
    for _ in range(10):
        params = CBParams(rng.uniform(-math.pi, math.pi, 3))
        system = BranchPhaseSystem(params)
        y = np.array([rng.uniform(-math.pi, math.pi), rng.uniform(0.2, 3.0)])
        jac = branch_jacobian(y[0], y[1], params)
        h = 1e-6
        fd = np.empty((2, 2))
        for col in range(2):
            e = np.zeros(2)
            e[col] = h
            fd[:, col] = (system.derivative(0.0, y + e) - system.derivative(0.0, y - e)) / (2 * h)
        assert np.max(np.abs(jac - fd)) < 1e-6


def test_branch_jacobian_validation():
    with pytest.raises(ValueError):
        branch_jacobian(0.1, 1.0, CBParams([0.1, 0.2]))
    with pytest.raises(ValueError):
        branch_jacobian(0.1, 0.0, CBParams([0.1, 0.2, 0.3]))


def test_classify_circling_sign_rule_pinned():
    base = [math.pi / 3, 2 * math.pi / 3]

    stable = classify_stability_3agent(CBParams(base + [math.pi / 4]), "circling")
    assert stable.classification == "stable"
    assert stable.trace_sign_quantity < 0
    assert max(e.real for e in stable.eigenvalues) < 0
    assert stable.theta_star == pytest.approx(3 * math.pi / 4)
    assert stable.rho_tilde_star == pytest.approx(
        math.sin(math.pi / 4) / math.sin(math.pi / 3), rel=1e-12
    )

    unstable = classify_stability_3agent(CBParams(base + [3 * math.pi / 4]), "circling")
    assert unstable.classification == "unstable"
    assert unstable.trace_sign_quantity > 0
    assert max(e.real for e in unstable.eigenvalues) > 0

    center = classify_stability_3agent(CBParams(base + [math.pi / 2]), "circling")
    assert center.classification == "marginal"
    assert center.trace_sign_quantity == pytest.approx(0.0, abs=1e-12)
    assert max(abs(e.real) for e in center.eigenvalues) < 1e-9
    assert all(abs(e.imag) > 0.1 for e in center.eigenvalues)


def _admissible_pure_shape_triple(rng):
    while True:
        a = rng.uniform(-math.pi, math.pi, 3)
        beta = 0.5 * (a[0] + a[1])
        c1 = math.cos(a[0] - beta)
        c3 = math.cos(a[2] - beta)
        if min(abs(c1), abs(c3)) > 0.1 and c1 * c3 > 0:
            return CBParams(a)


def test_classify_pure_shape_matches_general_enumeration(rng):
    g = validate_graph([1, 0, 0])
    for _ in range(10):
        params = _admissible_pure_shape_triple(rng)
        verdict = classify_stability_3agent(params, "pure_shape")
        # the two-cycle enumeration hits this family at phase index 1
        rep = pure_shape_equilibria(params, g)[1]
        assert rep.admissible
        assert rep.theta[(2, 0)] == pytest.approx(verdict.theta_star, abs=1e-12)
        assert rep.rho_tilde[(2, 0)] == pytest.approx(verdict.rho_tilde_star, rel=1e-12)


def test_classify_families_coincide_on_circling_pair(rng):
    # with a2 = pi - a1 the shape-preserving branch equilibrium is the
    # circling one, so both classifications must agree
    for _ in range(10):
        a1 = rng.uniform(0.15, math.pi - 0.15)
        a3 = rng.uniform(0.1, math.pi - 0.1)
        params = CBParams([a1, math.pi - a1, a3])
        circ = classify_stability_3agent(params, "circling")
        pure = classify_stability_3agent(params, "pure_shape")
        assert pure.theta_star == pytest.approx(circ.theta_star, abs=1e-12)
        assert pure.rho_tilde_star == pytest.approx(circ.rho_tilde_star, rel=1e-12)
        assert pure.trace_sign_quantity == pytest.approx(
            circ.trace_sign_quantity, abs=1e-12
        )
        assert _sorted(pure.eigenvalues) == pytest.approx(
            _sorted(circ.eigenvalues), abs=1e-12
        )


def test_branch_determinant_identity(rng):
    # at the shape-preserving equilibrium det J = 2 cos^2(a1 - beta) > 0,
    # so the trace alone decides stability
    for _ in range(15):
        params = _admissible_pure_shape_triple(rng)
        verdict = classify_stability_3agent(params, "pure_shape")
        jac = branch_jacobian(verdict.theta_star, verdict.rho_tilde_star, params)
        a1, a2, _ = (float(v) for v in params.alpha)
        beta = 0.5 * (a1 + a2)
        expected = 2.0 * math.cos(a1 - beta) ** 2
        assert np.linalg.det(jac) == pytest.approx(expected, rel=1e-10)
        assert expected > 0.0


def test_sign_rule_agrees_with_eigenvalues(rng):
    checked = 0
    while checked < 20:
        params = _admissible_pure_shape_triple(rng)
        verdict = classify_stability_3agent(params, "pure_shape")
        if abs(verdict.trace_sign_quantity) < 0.1:
            continue
        max_real = max(e.real for e in verdict.eigenvalues)
        assert math.copysign(1.0, verdict.trace_sign_quantity) == math.copysign(
            1.0, max_real
        )
        checked += 1


def test_classify_inadmissible_and_unknown():
    with pytest.raises(InadmissibleEquilibriumError):
        classify_stability_3agent(
            CBParams([math.pi / 3, -math.pi / 3, math.pi / 4]), "circling"
        )
    with pytest.raises(InadmissibleEquilibriumError):
        classify_stability_3agent(
            CBParams([math.pi / 3, math.pi / 4, math.pi / 4]), "circling"
        )
    with pytest.raises(InadmissibleEquilibriumError):
        # a1 - a2 = pi makes cos(a1 - beta) vanish
        classify_stability_3agent(
            CBParams([3 * math.pi / 4, -math.pi / 4, 0.3]), "pure_shape"
        )
    with pytest.raises(ValueError):
        classify_stability_3agent(CBParams([0.1, 0.2, 0.3]), "bogus")
    with pytest.raises(ValueError):
        classify_stability_3agent(CBParams([0.1, 0.2]), "circling")


# ------------------------------------------- projected modes vs closed form


def test_projected_modes_match_branch_jacobian_circling(rng):
    g = validate_graph([1, 0, 0])
    for _ in range(5):
        a1 = rng.uniform(0.15, math.pi - 0.15)
        a3 = rng.uniform(0.1, math.pi - 0.1)
        params = CBParams([a1, math.pi - a1, a3])
        rep = circling_equilibrium(params, g)
        assert rep.admissible
        modes = shape_equilibrium_modes(g, params, rep.theta, rep.rho_tilde)
        verdict = classify_stability_3agent(params, "circling")
        assert modes.shape == (2,)
        assert _sorted(modes) == pytest.approx(_sorted(verdict.eigenvalues), abs=1e-5)


def test_projected_modes_match_branch_jacobian_pure_shape(rng):
    g = validate_graph([1, 0, 0])
    for _ in range(5):
        params = _admissible_pure_shape_triple(rng)
        rep = pure_shape_equilibria(params, g)[1]
        assert rep.admissible
        modes = shape_equilibrium_modes(g, params, rep.theta, rep.rho_tilde)
        verdict = classify_stability_3agent(params, "pure_shape")
        assert modes.shape == (2,)
        assert _sorted(modes) == pytest.approx(_sorted(verdict.eigenvalues), abs=1e-5)


def test_equilibrium_report_mappings_are_readonly():
    g = validate_graph([1, 0])
    rep = circling_equilibrium(CBParams([math.pi / 3, 2 * math.pi / 3]), g)
    with pytest.raises(TypeError):
        rep.theta[(0, 1)] = 0.0
