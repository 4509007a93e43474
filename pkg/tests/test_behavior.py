import math

import numpy as np
import pytest

from cbpursuit import (
    CBParams,
    circling_equilibrium,
    classify_behavior,
    get_preset,
    predict_behavior,
    scenario_from_config,
    shape_equilibrium_modes,
    state_from_manifold_shape,
    validate_graph,
)
from cbpursuit.behavior import _angle_spread, shape_tangent_basis


def _rot(a: float) -> np.ndarray:
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def test_angle_spread_ignores_wrap_seam():
    seam = np.array([[math.pi - 1e-4], [-math.pi + 1e-4], [math.pi - 2e-4]])
    assert float(_angle_spread(seam).max()) < 5e-4
    assert float(np.ptp(seam)) > 6.0  # raw ptp straddles the seam


def test_classify_rectilinear_manufactured():
    g = validate_graph([1, 2, 0, 0])
    params = CBParams(get_preset("fig2a")["alpha"])
    times = np.linspace(0.0, 10.0, 40)
    v = np.array([math.cos(0.3), math.sin(0.3)])
    offsets = np.array([[0.0, 0.0], [1.0, -2.0], [2.5, 1.0], [-1.0, 0.5]])
    positions = offsets[None, :, :] + times[:, None, None] * v
    headings = np.broadcast_to(v, (40, 4, 2)).copy()
    assert classify_behavior(times, positions, headings, g, params) == "rectilinear"


def test_classify_short_trajectory_is_none():
    g = validate_graph([1, 0])
    params = CBParams([0.3, 0.4])
    times = np.linspace(0.0, 1.0, 5)
    positions = np.zeros((5, 2, 2))
    positions[:, 1, 0] = 1.0
    headings = np.zeros((5, 2, 2))
    headings[:, :, 1] = 1.0
    assert classify_behavior(times, positions, headings, g, params) == "none"


def test_classify_circling_manufactured():
    # rigid rotation of an equilibrium polygon about its computed center
    g = validate_graph([1, 2, 0])
    params = CBParams([math.pi / 3, math.pi / 4, 5 * math.pi / 12])
    rep = circling_equilibrium(params, g)
    rho_ref = 1.5
    rho = {arc: rho_ref * rep.rho_tilde[arc] for arc in g.arcs}
    state = state_from_manifold_shape(g, params, dict(rep.theta), rho)
    radius = rep.circling_radius * rho_ref
    center = state.agents[0].position + radius * state.agents[0].normal
    omega = 1.0 / radius  # unit speed on the circle

    times = np.linspace(0.0, 0.8 * 2 * math.pi * abs(radius), 200)
    positions = np.empty((200, 3, 2))
    headings = np.empty((200, 3, 2))
    for k, t in enumerate(times):
        R = _rot(omega * t)
        positions[k] = center + (state.positions - center) @ R.T
        headings[k] = state.headings @ R.T
    assert classify_behavior(times, positions, headings, g, params) == "circling"


def test_classify_spiral_manufactured():
    # self-similar expanding rotation: shape frozen, scale grows
    g = validate_graph([1, 2, 0])
    params = CBParams([math.pi / 3, math.pi / 4, 5 * math.pi / 12])
    q = np.array([_rot(2 * math.pi * i / 3) @ np.array([1.0, 0.0]) for i in range(3)])
    c, omega = 0.08, 0.5
    times = np.linspace(0.0, 20.0, 400)
    positions = np.empty((400, 3, 2))
    headings = np.empty((400, 3, 2))
    vel_gen = np.array([[c, -omega], [omega, c]])
    for k, t in enumerate(times):
        positions[k] = math.exp(c * t) * q @ _rot(omega * t).T
        v = positions[k] @ vel_gen.T
        headings[k] = v / np.linalg.norm(v, axis=1)[:, None]
    assert classify_behavior(times, positions, headings, g, params) == "spiral"


def test_classify_periodic_manufactured():
    # mutual-pursuit pair rotating rigidly while the branch arc's shape
    # oscillates sinusoidally around it
    g = validate_graph([1, 0, 0])
    params = CBParams([math.pi / 3, 2 * math.pi / 3, math.pi / 2])
    rep = circling_equilibrium(CBParams([math.pi / 3, 2 * math.pi / 3]),
                               validate_graph([1, 0]))
    rho_ref = 1.0
    rho = {arc: rho_ref * rep.rho_tilde[arc] for arc in rep.theta}
    pair = state_from_manifold_shape(validate_graph([1, 0]),
                                     CBParams([math.pi / 3, 2 * math.pi / 3]),
                                     dict(rep.theta), rho)
    radius = rep.circling_radius * rho_ref
    center = pair.agents[0].position + radius * pair.agents[0].normal
    omega = 1.0 / radius
    big_omega = 2 * math.pi / 5.0

    times = np.linspace(0.0, 60.0, 600)
    positions = np.empty((600, 3, 2))
    headings = np.empty((600, 3, 2))
    for k, t in enumerate(times):
        R = _rot(omega * t)
        positions[k, :2] = center + (pair.positions - center) @ R.T
        headings[k, :2] = pair.headings @ R.T
        theta_b = math.pi / 2 + 0.3 * math.sin(big_omega * t)
        rho_b = rho_ref * (1.0 + 0.1 * math.cos(big_omega * t))
        # place the branch agent so arc (2, 0) realizes (theta_b, rho_b)
        positions[k, 2] = positions[k, 0] + rho_b * (_rot(theta_b) @ headings[k, 0])
        headings[k, 2] = _rot(0.7) @ headings[k, 0]
    assert classify_behavior(times, positions, headings, g, params) == "periodic"


def test_classify_incoherent_motion_is_none(rng):
    g = validate_graph([1, 2, 0])
    params = CBParams([0.3, 0.5, 0.7])
    times = np.linspace(0.0, 10.0, 50)
    positions = rng.uniform(-5.0, 5.0, (50, 3, 2))
    angles = rng.uniform(-math.pi, math.pi, (50, 3))
    headings = np.stack([np.cos(angles), np.sin(angles)], axis=2)
    assert classify_behavior(times, positions, headings, g, params) == "none"


@pytest.mark.parametrize(
    "name,expected",
    [
        ("fig2a", "rectilinear"),
        ("fig2b", "circling"),
        ("fig2c", "spiral"),
        ("fig2d", "periodic"),
        ("fig3a", "none"),  # no admissible equilibrium to rank
        ("fig3b", "periodic"),
    ],
)
def test_predict_behavior_presets(name, expected):
    sc = scenario_from_config(get_preset(name))
    assert predict_behavior(sc.graph, sc.params) == expected


def test_tangent_basis_properties():
    sc = scenario_from_config(get_preset("fig2b"))
    rep = circling_equilibrium(sc.params, sc.graph)
    basis = shape_tangent_basis(sc.graph, sc.params, rep.theta, rep.rho_tilde)
    n_arcs = len(sc.graph.arcs)
    assert basis.shape == (2 * n_arcs, 2 * n_arcs - 4)
    assert np.allclose(basis.T @ basis, np.eye(basis.shape[1]), atol=1e-12)
    # the pinned reference-ratio coordinate is orthogonal to every column
    assert np.max(np.abs(basis[n_arcs])) < 1e-9


def test_projection_removes_structural_artifacts():
    sc = scenario_from_config(get_preset("fig2b"))
    rep = circling_equilibrium(sc.params, sc.graph)

    projected = np.sort_complex(
        shape_equilibrium_modes(sc.graph, sc.params, rep.theta, rep.rho_tilde)
    )
    expected = np.sort_complex(np.array([
        -0.7990381056766580 - 1.2694637056037740j,
        -0.7990381056766580 + 1.2694637056037740j,
        -0.75 - 0.9682458365518543j,
        -0.75 + 0.9682458365518543j,
    ]))
    assert projected == pytest.approx(expected, abs=1e-5)

    raw = shape_equilibrium_modes(
        sc.graph, sc.params, rep.theta, rep.rho_tilde, project=False
    )
    assert raw.shape == (8,)
    near_zero = sum(1 for e in raw if abs(e) < 1e-5)
    transverse_pair = sum(1 for e in raw if abs(e.real) < 1e-6 and abs(e) > 0.1)
    assert near_zero == 2
    assert transverse_pair == 2
