"""Tests for the particle swarm planner."""

import numpy as np
import pytest
from pydantic import ValidationError

from swarmpath.planning import SplineError
from swarmpath.planning.cost import CostConfig, path_cost
from swarmpath.planning.pso import (
    PsoConfig,
    SwarmObjective,
    convergence_iteration,
    init_swarm,
    plan,
    pso_step,
)
from swarmpath.planning.spline import ControlPolygon, SplineConfig, control_bounds, sample_path
from swarmpath.rng import particle_rngs

# ---------------------------------------------------------------------------
# Helper fixtures
# ---------------------------------------------------------------------------


class _FlatObjective:
    """Prices every position at the same cost."""

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        return np.ones(len(positions))


@pytest.fixture
def bounds(blocked_ws):
    return control_bounds(blocked_ws, 3)


@pytest.fixture
def objective(blocked_ws, fast_spline, cost_cfg, bounds):
    return SwarmObjective(blocked_ws, fast_spline, cost_cfg, bounds)


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


class TestPsoConfig:
    def test_defaults(self):
        cfg = PsoConfig()
        assert (cfg.iter_max, cfg.pop_max, cfg.n_control_points) == (300, 100, 5)
        assert (cfg.inertia_w, cfg.c1, cfg.c2) == (0.9, 2.0, 2.0)
        assert cfg.convergence_rel_tol == 1e-3

    def test_inertia_constant_by_default(self):
        cfg = PsoConfig()
        assert cfg.inertia_damping == 1.0
        assert [cfg.inertia_at(k) for k in (0, 100, 299)] == pytest.approx([0.9, 0.9, 0.9])

    def test_inertia_schedule(self):
        cfg = PsoConfig(inertia_w=0.8, inertia_damping=0.5)
        assert cfg.inertia_at(0) == pytest.approx(0.8)
        assert cfg.inertia_at(2) == pytest.approx(0.2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"iter_max": 0},
            {"pop_max": 1},
            {"inertia_w": 0.0},
            {"inertia_w": 1.5},
            {"c1": -1.0},
            {"n_control_points": 0},
            {"seed": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            PsoConfig(**kwargs)


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------


class TestSwarmObjective:
    def test_matches_single_path_cost(self, blocked_ws, fast_spline, cost_cfg, bounds, objective):
        rng = np.random.default_rng(0)
        positions = bounds.flat_lower + rng.random((4, 6)) * (bounds.flat_upper - bounds.flat_lower)
        totals = objective(positions)
        for row, total in zip(positions, totals):
            polygon = ControlPolygon.from_flat(row, blocked_ws.start, blocked_ws.target)
            expected = path_cost(sample_path(polygon, fast_spline), blocked_ws, cost_cfg).total
            assert total == pytest.approx(expected, rel=1e-9)

    def test_counts_evaluations(self, bounds, objective):
        objective(np.tile(bounds.flat_lower, (5, 1)))
        objective(np.tile(bounds.flat_upper, (3, 1)))
        assert objective.evaluations == 8


# ---------------------------------------------------------------------------
# Swarm operations
# ---------------------------------------------------------------------------


class TestInitSwarm:
    def test_positions_and_velocities_in_range(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        span = bounds.flat_upper - bounds.flat_lower
        assert swarm.size == fast_pso.pop_max
        assert np.all(swarm.positions >= bounds.flat_lower)
        assert np.all(swarm.positions <= bounds.flat_upper)
        assert np.all(np.abs(swarm.velocities) <= span)

    def test_personal_and_global_best(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        assert np.array_equal(swarm.pbest_positions, swarm.positions)
        assert np.array_equal(swarm.pbest_costs, swarm.costs)
        assert swarm.gbest_index == int(np.argmin(swarm.costs))
        assert swarm.gbest_cost == swarm.costs.min()

    def test_deterministic(self, bounds, objective, fast_pso):
        a = init_swarm(bounds, fast_pso, objective)
        b = init_swarm(bounds, fast_pso, objective)
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.velocities, b.velocities)

    def test_minimum_swarm(self, bounds, objective):
        swarm = init_swarm(bounds, PsoConfig(pop_max=2, n_control_points=3), objective)
        assert swarm.size == 2

    def test_particle_snapshot_is_a_copy(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        snapshot = swarm.particle(0)
        snapshot.position[:] = -1.0
        assert np.all(swarm.positions[0] >= bounds.flat_lower)


class TestPsoStep:
    def test_zero_coefficients_freeze_swarm(self, bounds, objective):
        cfg = PsoConfig(pop_max=6, n_control_points=3, c1=0.0, c2=0.0)
        swarm = init_swarm(bounds, cfg, objective)
        before = swarm.positions.copy()
        pso_step(swarm, cfg, objective, inertia=0.0)
        assert np.all(swarm.velocities == 0.0)
        assert np.array_equal(swarm.positions, before)

    def test_particle_at_best_with_no_velocity_stays(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        best = swarm.gbest_index
        swarm.velocities[best] = 0.0
        position = swarm.positions[best].copy()
        pso_step(swarm, fast_pso, objective)
        assert np.array_equal(swarm.positions[best], position)

    def test_global_best_never_worsens(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        for _ in range(10):
            before = swarm.gbest_cost
            pso_step(swarm, fast_pso, objective)
            assert swarm.gbest_cost <= before

    def test_clamped_to_bounds_with_velocity_zeroed(self, bounds, objective, fast_pso):
        swarm = init_swarm(bounds, fast_pso, objective)
        swarm.velocities[:] = 100.0
        cfg = fast_pso.model_copy(update={"c1": 0.0, "c2": 0.0})
        pso_step(swarm, cfg, objective, inertia=1.0)
        assert np.allclose(swarm.positions, bounds.flat_upper)
        assert np.all(swarm.velocities == 0.0)

    def test_equal_cost_replaces_personal_best(self, bounds, fast_pso):
        flat = _FlatObjective()
        swarm = init_swarm(bounds, fast_pso, flat)
        pso_step(swarm, fast_pso, flat)
        assert np.array_equal(swarm.pbest_positions, swarm.positions)

    def test_ties_go_to_first_particle(self, bounds, fast_pso):
        flat = _FlatObjective()
        swarm = init_swarm(bounds, fast_pso, flat)
        assert swarm.gbest_index == 0
        pso_step(swarm, fast_pso, flat)
        assert swarm.gbest_index == 0

    def test_explicit_streams_match_seeded_default(self, bounds, objective, fast_pso):
        a = init_swarm(bounds, fast_pso, objective)
        rngs = particle_rngs(fast_pso.seed, fast_pso.pop_max)
        b = init_swarm(bounds, fast_pso, objective, rngs=rngs)
        pso_step(a, fast_pso, objective)
        pso_step(b, fast_pso, objective)
        assert np.array_equal(a.positions, b.positions)


# ---------------------------------------------------------------------------
# Convergence
# ---------------------------------------------------------------------------


class TestConvergenceIteration:
    def test_constant_history(self):
        assert convergence_iteration([3.0, 3.0, 3.0], 1e-3) == 0

    def test_improving_until_last(self):
        assert convergence_iteration([4.0, 3.0, 2.0, 1.0], 0.0) == 3

    def test_within_tolerance(self):
        assert convergence_iteration([10.0, 5.0, 5.004, 5.0], 1e-3) == 1

    def test_empty_history(self):
        with pytest.raises(ValueError):
            convergence_iteration([], 1e-3)


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------


class TestPlan:
    def test_histories(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        result = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        best = result.best_cost_history
        assert len(best) == fast_pso.iter_max
        assert np.all(np.diff(best) <= 0)
        assert np.all(result.mean_cost_history >= best)
        assert best[-1] == pytest.approx(result.best_cost.total)
        assert 0 <= result.converged_at_iteration < fast_pso.iter_max

    def test_deterministic(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        a = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        b = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        assert np.array_equal(a.best_cost_history, b.best_cost_history)
        assert np.array_equal(a.mean_cost_history, b.mean_cost_history)
        assert np.array_equal(a.best_polygon.interior_points, b.best_polygon.interior_points)
        assert a.converged_at_iteration == b.converged_at_iteration

    def test_seed_changes_result(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        a = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        b = plan(blocked_ws, fast_spline, cost_cfg, fast_pso.model_copy(update={"seed": 8}))
        assert not np.array_equal(a.best_cost_history, b.best_cost_history)

    def test_control_points_within_bounds(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        result = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        interior = result.best_polygon.interior_points
        assert np.all(interior >= result.bounds.lower)
        assert np.all(interior <= result.bounds.upper)
        assert tuple(result.best_path.points[0]) == pytest.approx(blocked_ws.start)
        assert tuple(result.best_path.points[-1]) == pytest.approx(blocked_ws.target)

    def test_success_flag_follows_collision(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        result = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        assert result.success == (result.best_cost.collision == 0.0)

    def test_open_field_near_straight_line(self, empty_ws, fast_spline, cost_cfg):
        cfg = PsoConfig(iter_max=80, pop_max=20, n_control_points=3, seed=1)
        result = plan(empty_ws, fast_spline, cost_cfg, cfg)
        assert result.success
        assert result.best_cost.length < 1.15 * empty_ws.straight_distance

    def test_timings_recorded(self, blocked_ws, fast_spline, cost_cfg, fast_pso):
        result = plan(blocked_ws, fast_spline, cost_cfg, fast_pso)
        assert result.wall_time > 0
        assert result.cpu_time >= 0
        assert result.seed == fast_pso.seed

    def test_too_few_samples(self, blocked_ws, cost_cfg, fast_pso):
        with pytest.raises(SplineError):
            plan(blocked_ws, SplineConfig(sample_count_N=9), cost_cfg, fast_pso)

    def test_acceleration_constraint_accepted(self, blocked_ws, fast_spline, fast_pso):
        cost = CostConfig(use_acceleration_constraint=True)
        best = plan(blocked_ws, fast_spline, cost, fast_pso).best_cost
        violation = best.collision + best.velocity + best.acceleration
        assert best.total == pytest.approx(best.length * (1 + cost.beta_p * violation))
