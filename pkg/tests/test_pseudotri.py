import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavloc.errors import GeometryError, ParameterError, ShapeError, SizeError
from uavloc.geometry import TrajectoryParams, UavPath, gen_uav_trajectory, true_ranges
from uavloc.pseudotri import (
    Ambiguity,
    PseudoTriInstance,
    ambiguity_check,
    circle_bins,
    feasible_circle,
    lemma1_two_solutions,
    mirror_across_line,
    path_cost,
    project_to_circle,
    snap_to_bins,
    solve_dp_oracle,
    solve_greedy,
)

TARGET = np.array([30.0, 40.0, 0.0])


def static_instance(n=100, rho=100.0, target=TARGET, a=0.0):
    path = gen_uav_trajectory(TrajectoryParams(0, 0, 100, rho, a, n))
    return PseudoTriInstance(path, true_ranges(path, np.tile(target, (n, 1))))


def random_instance(rng, n=20, noise=5.0):
    path = gen_uav_trajectory(TrajectoryParams(0, 0, 100, 100, 0, n))
    target = np.append(rng.uniform(-60, 60, 2), 0.0)
    ranges = true_ranges(path, np.tile(target, (n, 1))) + rng.normal(0, noise, n)
    return PseudoTriInstance(path, np.abs(ranges))


@pytest.mark.parametrize("gamma, radius", [(100.0, 0.0), (141.421, np.sqrt(141.421**2 - 100**2)), (50.0, 0.0)])
def test_feasible_circle_examples(gamma, radius):
    c = feasible_circle([0, 0, 100], gamma)
    assert c.radius == pytest.approx(radius, abs=1e-9)
    assert c.radius == pytest.approx(100.0 if gamma > 140 else 0.0, abs=1e-3)
    np.testing.assert_array_equal(c.center, [0, 0])


def test_feasible_circle_negative_range():
    with pytest.raises(ParameterError):
        feasible_circle([0, 0, 100], -1.0)


def test_greedy_fixpoint_at_target():
    track = solve_greedy(static_instance(), init=TARGET[:2])
    assert np.abs(track.positions - TARGET[:2]).max() < 1e-6
    assert track.path_cost < 1e-6


def test_greedy_repeated_sweeps_converge_from_default_init():
    inst = static_instance()
    one = solve_greedy(inst)
    many = solve_greedy(inst, passes=100)
    assert np.linalg.norm(one.positions - TARGET[:2], axis=1).max() > 1.0
    assert np.linalg.norm(many.positions - TARGET[:2], axis=1).max() < 1e-6


def test_greedy_first_step_is_projection_of_init():
    inst = static_instance(n=10)
    init = np.array([5.0, -7.0])
    track = solve_greedy(inst, init)
    np.testing.assert_allclose(track.positions[0], project_to_circle(init, inst.centers[0], inst.radii[0]))
    for n in range(1, 10):
        np.testing.assert_allclose(
            track.positions[n], project_to_circle(track.positions[n - 1], inst.centers[n], inst.radii[n]))


def test_center_tie_break_picks_angle_zero():
    np.testing.assert_array_equal(project_to_circle([2.0, 3.0], np.array([2.0, 3.0]), 5.0), [7.0, 3.0])


def test_zero_radii_give_spot_positions():
    path = gen_uav_trajectory(TrajectoryParams(0, 0, 100, 100, 0, 12))
    track = solve_greedy(PseudoTriInstance(path, np.full(12, 50.0)))
    np.testing.assert_array_equal(track.positions, path.horizontal)


def test_greedy_is_deterministic():
    inst = random_instance(np.random.default_rng(1))
    a, b = solve_greedy(inst), solve_greedy(inst)
    assert a.positions.tobytes() == b.positions.tobytes()


def test_path_cost_recomputable():
    track = solve_greedy(random_instance(np.random.default_rng(2)))
    steps = np.linalg.norm(np.diff(track.positions, axis=0), axis=1)
    assert track.path_cost == pytest.approx(steps.sum(), rel=1e-12)


def test_bad_greedy_inputs():
    inst = static_instance(n=5)
    with pytest.raises(ParameterError):
        solve_greedy(inst, init=[np.inf, 0])
    with pytest.raises(ParameterError):
        solve_greedy(inst, passes=0)
    with pytest.raises(ShapeError):
        PseudoTriInstance(inst.spots, np.ones(4))
    with pytest.raises(ParameterError):
        PseudoTriInstance(inst.spots, -np.ones(5))


def test_dp_single_circle_costs_zero():
    track = solve_dp_oracle(PseudoTriInstance(UavPath([[1.0, 2.0, 100.0]]), [120.0]), 16)
    assert track.path_cost == 0.0 and track.positions.shape == (1, 2)


def test_dp_two_circles_matches_exhaustive():
    rng = np.random.default_rng(3)
    for _ in range(10):
        path = UavPath(np.column_stack([rng.uniform(-50, 50, (2, 2)), [100, 100]]))
        inst = PseudoTriInstance(path, rng.uniform(110, 160, 2))
        pts = circle_bins(inst, 8)
        brute = min(np.linalg.norm(pts[0, i] - pts[1, j]) for i, j in itertools.product(range(8), range(8)))
        assert solve_dp_oracle(inst, 8).path_cost == pytest.approx(brute, rel=1e-12)


def test_dp_matches_exhaustive_small_chain():
    rng = np.random.default_rng(4)
    inst = random_instance(rng, n=4, noise=3.0)
    pts = circle_bins(inst, 8)
    brute = min(path_cost(pts[np.arange(4), list(idx)]) for idx in itertools.product(range(8), repeat=4))
    assert solve_dp_oracle(inst, 8).path_cost == pytest.approx(brute, rel=1e-12)


def test_dp_not_worse_than_snapped_greedy():
    rng = np.random.default_rng(5)
    for _ in range(50):
        inst = random_instance(rng)
        dp = solve_dp_oracle(inst, 360)
        snapped = snap_to_bins(solve_greedy(inst), inst, 360)
        assert dp.path_cost <= snapped.path_cost + 1e-9


def test_dp_positions_on_circles():
    inst = random_instance(np.random.default_rng(6))
    track = solve_dp_oracle(inst, 64)
    np.testing.assert_allclose(np.linalg.norm(track.positions - inst.centers, axis=1), inst.radii, atol=1e-9)


def test_dp_limits():
    with pytest.raises(ParameterError):
        solve_dp_oracle(static_instance(n=3), 4)
    with pytest.raises(SizeError):
        solve_dp_oracle(static_instance(n=1000), 720)


def test_two_solution_example():
    p1, p2 = lemma1_two_solutions([0, 0, 10], [10, 0, 10], np.sqrt(9 + 25 + 100), np.sqrt(49 + 25 + 100), (0, 0))
    np.testing.assert_allclose(p1, [3, 5], atol=1e-9)
    np.testing.assert_allclose(p2, [3, -5], atol=1e-9)


def test_two_solution_target_on_line_collapses():
    r, q = 0.5, 2.0
    a, b = np.array([0.0, 2.0, 20.0]), np.array([10.0, 7.0, 20.0])
    target = np.array([4.0, 4.0, 0.0])
    p1, p2 = lemma1_two_solutions(a, b, np.linalg.norm(a - target), np.linalg.norm(b - target), (r, q))
    np.testing.assert_allclose(p1, target[:2], atol=1e-6)
    np.testing.assert_allclose(p2, target[:2], atol=1e-6)


def test_two_solution_mirror_swaps_outputs():
    r, q = 0.5, 2.0
    a, b = np.array([0.0, 2.0, 20.0]), np.array([10.0, 7.0, 20.0])
    t = np.array([3.0, 9.0, 0.0])
    tm = np.append(mirror_across_line(t, r, q), 0.0)
    first = lemma1_two_solutions(a, b, np.linalg.norm(a - t), np.linalg.norm(b - t), (r, q))
    second = lemma1_two_solutions(a, b, np.linalg.norm(a - tm), np.linalg.norm(b - tm), (r, q))
    np.testing.assert_allclose(first[0], second[0], atol=1e-9)
    np.testing.assert_allclose(first[1], second[1], atol=1e-9)
    np.testing.assert_allclose(first[0], t[:2], atol=1e-9)
    np.testing.assert_allclose(first[1], tm[:2], atol=1e-9)


def test_two_solution_errors():
    with pytest.raises(GeometryError):
        lemma1_two_solutions([0, 0, 0], [10, 0, 0], 1.0, 1.0, (0, 0))
    with pytest.raises(GeometryError):
        lemma1_two_solutions([0, 1, 0], [10, 0, 0], 8.0, 8.0, (0, 0))
    with pytest.raises(GeometryError):
        lemma1_two_solutions([0, 0, 0], [0, 0, 0], 8.0, 8.0, (0, 0))


def test_ambiguity_classifier():
    circle = gen_uav_trajectory(TrajectoryParams(0, 0, 100, 100, 0, 20))
    line = UavPath(np.column_stack([np.arange(10.0), 2 * np.arange(10.0) + 1, np.full(10, 100.0)]))
    assert ambiguity_check(circle) is Ambiguity.UNIQUE
    assert ambiguity_check(line) is Ambiguity.DOUBLE
    assert ambiguity_check(line, target_altitude_known=False) is Ambiguity.CIRCLE_OF_SOLUTIONS
    with pytest.raises(ParameterError):
        ambiguity_check(UavPath(np.zeros((2, 3))))


def test_ambiguity_tolerance():
    spots = np.column_stack([np.arange(10.0), np.zeros(10), np.full(10, 50.0)])
    spots[4, 1] = 5e-10
    assert ambiguity_check(UavPath(spots)) is Ambiguity.DOUBLE
    spots[4, 1] = 1e-6
    assert ambiguity_check(UavPath(spots)) is Ambiguity.UNIQUE


def test_greedy_feasible_on_noisy_instances():
    rng = np.random.default_rng(8)
    for _ in range(20):
        inst = random_instance(rng)
        track = solve_greedy(inst, init=rng.uniform(-100, 100, 2))
        assert np.max(np.abs(np.linalg.norm(track.positions - inst.centers, axis=1) - inst.radii)) < 1e-9


small = st.floats(-100, 100)


@given(small, small, st.floats(-5, 5), small, small, small)
def test_two_solution_solutions_satisfy_ranges(r, q, xa, xb, xt, yt):
    if abs(xa - xb) < 1.0:
        return
    a = np.array([xa, r * xa + q, 30.0])
    b = np.array([xb, r * xb + q, 30.0])
    t = np.array([xt, yt, 0.0])
    ga, gb = np.linalg.norm(a - t), np.linalg.norm(b - t)
    p1, p2 = lemma1_two_solutions(a, b, ga, gb, (r, q))
    scale = max(ga, gb, 1.0)
    for p in (p1, p2):
        pz = np.append(p, 0.0)
        assert abs(np.linalg.norm(a - pz) - ga) < 1e-9 * scale ** 2
        assert abs(np.linalg.norm(b - pz) - gb) < 1e-9 * scale ** 2
    np.testing.assert_allclose(mirror_across_line(p1, r, q), p2, atol=1e-6 * scale)


@given(small, small, small, small, st.integers(3, 12))
def test_mirror_target_keeps_ranges_on_collinear_path(r, q, xt, yt, n):
    r = r / 20
    xs = np.linspace(-50, 50, n)
    path = UavPath(np.column_stack([xs, r * xs + q, np.full(n, 80.0)]))
    t = np.array([xt, yt, 0.0])
    tm = np.append(mirror_across_line(t, r, q), 0.0)
    g = true_ranges(path, np.tile(t, (n, 1)))
    gm = true_ranges(path, np.tile(tm, (n, 1)))
    assert np.max(np.abs(g - gm)) < 1e-9 * max(g.max(), 1.0)
    assert ambiguity_check(path) is Ambiguity.DOUBLE
