import json
import math

import pytest

import orcasim


def test_unconstrained_target_is_returned_or_clipped():
    r = orcasim.solve_closest_point([], (0.3, -0.4), 2.0)
    assert r["feasible"]
    assert r["velocity"] == pytest.approx((0.3, -0.4))
    r = orcasim.solve_closest_point([], (3.0, 4.0), 1.0)
    assert r["velocity"] == pytest.approx((0.6, 0.8))


def test_single_half_plane_projects_target():
    # Permitted region x >= 1.
    r = orcasim.solve_closest_point([(1.0, 0.0, 1.0, 0.0)], (0.0, 0.5), 2.0)
    assert r["feasible"]
    assert r["velocity"] == pytest.approx((1.0, 0.5))


def test_contradictory_planes_use_fallback():
    planes = [(1.0, 0.0, 1.0, 0.0), (-1.0, 0.0, -1.0, 0.0)]
    r = orcasim.solve_closest_point(planes, (0.0, 0.0), 2.0)
    assert not r["feasible"]
    assert r["failed_at"] in (0, 1)
    assert abs(r["velocity"][0]) < 1e-6


def test_batch_matches_single_solves():
    problems = [([(0.1 * k, 0.0, 1.0, 0.0)], (-1.0, 0.2 * k), 1.5, k) for k in range(20)]
    single = [orcasim.solve_closest_point(*p) for p in problems]
    assert orcasim.solve_batch(problems, workers=1) == single
    assert orcasim.solve_batch(problems, workers=3) == single


def test_bad_normal_raises_value_error():
    with pytest.raises(ValueError):
        orcasim.solve_closest_point([(0.0, 0.0, 2.0, 0.0)], (0.0, 0.0), 1.0)


def test_vo_exit_through_cutoff_disc():
    # Disc of radius 0.5 centred at (2, 0); the velocity (1.8, 0) sits 0.3 inside its front edge.
    e = orcasim.compute_vo_exit((4.0, 0.0), (1.8, 0.0), 1.0, 2.0, 0.1)
    assert e["region"] == "cutoff_disc"
    assert e["u"] == pytest.approx((-0.3, 0.0))
    assert e["normal"] == pytest.approx((-1.0, 0.0))


def test_crossing_runs_collision_free_and_deterministic():
    scenario = orcasim.make_crossing("two_way", 8, 0.0, 3)
    doc = json.loads(scenario)
    assert sum(r["count"] for r in doc["regions"]) == 16
    a = orcasim.run_scenario(scenario, workers=1, trajectory=True)
    b = orcasim.run_scenario(scenario, workers=2, trajectory=True)
    assert a["terminated"]
    assert a["agents"] == 16
    assert a["remaining_agents"] == 0
    assert a["total_collisions"] == 0
    assert not math.isnan(a["mean_travel_time"]["pedestrian"])
    assert a["trajectory_csv"] == b["trajectory_csv"]


def test_unknown_crossing_kind():
    with pytest.raises(ValueError):
        orcasim.make_crossing("three_way", 4)
