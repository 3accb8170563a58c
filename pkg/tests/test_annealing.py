"""Tests for simulated-annealing preparation."""

from __future__ import annotations

import random

import pytest

from anticipatory_tamp.domain import geometry, namo
from anticipatory_tamp.learning.oracle import OracleEstimator
from anticipatory_tamp.models.types import AnnealingSchedule, Pose2, WorldState
from anticipatory_tamp.planning import annealing, solver
from tests.conftest import make_cabinet, make_namo


class _ScriptedRng:
    """Hands out pre-set uniforms; fails loudly if drawn more than expected."""

    def __init__(self, draws):
        self.draws = list(draws)

    def random(self) -> float:
        return self.draws.pop(0)


class _ByX:
    """Estimate keyed on block0's x coordinate."""

    def __init__(self, values):
        self.values = values

    def estimate(self, state: WorldState) -> float:
        return self.values[state.pose("block0").x]


class _Spread:
    """Sum of block distances from home: cheap, smooth stand-in for an expected cost."""

    def __init__(self, scenario):
        self.home = scenario.home_pose

    def estimate(self, state: WorldState) -> float:
        return sum(state.pose(e).distance(self.home) for e in state.movable)


def test_acceptance_rule():
    assert annealing.accept(-1.0, 0.0, _ScriptedRng([]))
    assert not annealing.accept(1.0, 0.0, _ScriptedRng([]))
    assert annealing.accept(0.0, 10.0, _ScriptedRng([0.999]))
    assert not annealing.accept(10.0, 10.0, _ScriptedRng([0.5]))


def test_scripted_run_follows_metropolis():
    scenario = make_namo()
    s0 = scenario.initial_state()
    proposals = [s0.with_pose("block0", Pose2(float(x), 8.0)) for x in (3, 4, 5, 6)]
    estimator = _ByX({2.0: 10.0, 3.0: 8.0, 4.0: 8.0, 5.0: 20.0, 6.0: 9.0})
    queue = list(proposals)

    def neighbor(state, rng):
        return queue.pop(0)

    # delta 0 -> draw 0.3 (accept); delta 12 at T=902.5 -> 0.99 (reject); delta 1 -> 0.5 (accept)
    rng = _ScriptedRng([0.3, 0.99, 0.5])
    trace = annealing.prepare_with_trace(
        scenario, s0, estimator, AnnealingSchedule(iterations=4), rng=rng, neighbor=neighbor
    )
    assert trace.accepted == [True, True, False, True]
    assert trace.proposals == [8.0, 8.0, 20.0, 9.0]
    assert trace.best is proposals[0]
    assert trace.best_value == 8.0
    assert trace.initial_value == 10.0
    assert rng.draws == []
    assert trace.acceptance_rate == 0.75


def test_temperatures_cool_geometrically():
    scenario = make_namo()
    trace = annealing.prepare_with_trace(
        scenario,
        scenario.initial_state(),
        _Spread(scenario),
        AnnealingSchedule(iterations=50),
        rng=random.Random(0),
    )
    assert trace.temperatures == [1000.0 * 0.95**i for i in range(50)]


def test_zero_iterations_returns_the_input():
    scenario = make_namo()
    s0 = scenario.initial_state()
    assert annealing.prepare(scenario, s0, _Spread(scenario), AnnealingSchedule(iterations=0)) is s0


def test_prepared_state_is_never_worse():
    scenario = make_namo()
    estimator = _Spread(scenario)
    s0 = scenario.initial_state()
    for seed in range(50):
        best = annealing.prepare(scenario, s0, estimator, AnnealingSchedule(iterations=100), rng=random.Random(seed))
        assert estimator.estimate(best) <= estimator.estimate(s0)
        assert geometry.is_valid_state(scenario, best)


def test_preparation_is_seeded():
    scenario = make_namo()
    s0 = scenario.initial_state()
    schedule = AnnealingSchedule(iterations=30)
    a = annealing.prepare(scenario, s0, _Spread(scenario), schedule, rng=random.Random(4))
    b = annealing.prepare(scenario, s0, _Spread(scenario), schedule, rng=random.Random(4))
    assert dict(a.poses) == dict(b.poses)


def test_neighbor_moves_one_object_and_stays_valid():
    scenario = make_namo()
    state = scenario.initial_state()
    rng = random.Random(1)
    moved = set()
    for _ in range(1000):
        nxt = annealing.get_neighbor(scenario, state, rng)
        changed = [e for e in state.movable if nxt.pose(e) != state.pose(e)]
        assert len(changed) <= 1
        assert geometry.is_valid_state(scenario, nxt)
        assert nxt.symbolic == state.symbolic
        for e in changed:
            assert nxt.pose(e).distance(state.pose(e)) <= 0.2 * 10.0 + 1e-9
        moved.update(changed)
    assert moved == set(state.movable)


def test_neighbor_keeps_cabinet_objects_in_their_region():
    scenario = make_cabinet()
    state = scenario.initial_state()
    rng = random.Random(2)
    for _ in range(200):
        state = annealing.get_neighbor(scenario, state, rng)
    assert geometry.is_valid_state(scenario, state)
    assert state.in_region("table") == scenario.movable_ids


def test_neighbor_gives_up_without_tries():
    scenario = make_namo()
    state = scenario.initial_state()
    assert annealing.get_neighbor(scenario, state, random.Random(0), max_tries=0) is state


def test_preparation_cost_is_total_displacement():
    scenario = make_namo()
    s0 = scenario.initial_state()
    moved = s0.with_pose("block0", Pose2(5.0, 12.0))
    assert annealing.preparation_cost(s0, moved) == pytest.approx(5.0)


# ---------------------------------------------------------------------------
# Jump proposals
# ---------------------------------------------------------------------------


class _BlockedTargets:
    """Number of blockers across every target's corridor."""

    def __init__(self, scenario):
        self.scenario = scenario

    def estimate(self, state: WorldState) -> float:
        return float(
            sum(
                len(geometry.blockers(self.scenario, namo.target_corridor(self.scenario, state, t), state, ignore={t}))
                for t in state.movable
            )
        )


def test_schedule_jumps_by_default():
    assert AnnealingSchedule().jump_probability == pytest.approx(0.1)


@pytest.mark.parametrize("make", [make_namo, make_cabinet])
def test_jump_neighbor_moves_one_object_within_its_region(make):
    scenario = make()
    state = scenario.initial_state()
    regions = {e: state.placement(e) for e in state.movable}
    rng = random.Random(5)
    for _ in range(300):
        nxt = annealing.get_neighbor(scenario, state, rng, jump_probability=1.0)
        assert len([e for e in state.movable if nxt.pose(e) != state.pose(e)]) <= 1
        assert geometry.is_valid_state(scenario, nxt)
        state = nxt
    assert {e: state.placement(e) for e in state.movable} == regions


def test_jumps_free_a_blocker_that_local_moves_cannot():
    # block1 sits on block0's path; 60 local steps of 0.01 m cannot carry it clear
    scenario = make_namo(blocks=((8.5, 5.0), (6.8, 5.0)))
    s0 = scenario.initial_state()
    estimator = _BlockedTargets(scenario)
    assert estimator.estimate(s0) == 1.0

    local = AnnealingSchedule(iterations=60, perturbation_fraction=1e-3, jump_probability=0.0)
    stuck = annealing.prepare(scenario, s0, estimator, local, rng=random.Random(0))
    assert estimator.estimate(stuck) == 1.0

    jumping = local.model_copy(update={"jump_probability": 0.5})
    freed = annealing.prepare(scenario, s0, estimator, jumping, rng=random.Random(0))
    assert estimator.estimate(freed) == 0.0
    assert geometry.is_valid_state(scenario, freed)


def test_preparation_beats_random_search_on_the_same_budget():
    scenario = make_namo()
    estimator = OracleEstimator(scenario, samples_per_task=2)
    budget = 200
    prepared = annealing.prepare(
        scenario, scenario.initial_state(), estimator, AnnealingSchedule(iterations=budget), rng=random.Random(0)
    )
    rng = random.Random(0)
    baseline = min(estimator.estimate(solver.random_state(scenario, rng)) for _ in range(budget))
    assert estimator.estimate(prepared) <= baseline
