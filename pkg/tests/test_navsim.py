import math
import random

import networkx as nx
import pytest

from tourbot.errors import NoPath, UnknownExhibit
from tourbot.navsim import (
    Command,
    Mode,
    MotionConfig,
    RobotState,
    apply_low_level,
    eta,
    plan_path,
    tick,
)
from tourbot.worldmap import Pose, load_map

from conftest import make_exhibit, make_world_doc

CFG = MotionConfig()


def open_floor(width=8, height=8):
    rows = ["." * width for _ in range(height)]
    return load_map(make_world_doc(rows))


def corridor_world(goal_theta=0.0):
    # 0.5 m cells; start center (0.75, 0.75), goal center 2 m further east.
    rows = ["#########", "#.......#", "#########"]
    ex = make_exhibit(1, 2.75, 0.75, theta=goal_theta)
    return load_map(make_world_doc(rows, exhibits=[ex]))


def random_world(seed: int, width=20, height=20, p_block=0.2):
    rng = random.Random(seed)
    while True:
        rows = [
            "".join(
                "#" if rng.random() < p_block else "." for _ in range(width)
            )
            for _ in range(height)
        ]
        free = [
            (c, r)
            for r in range(height)
            for c in range(width)
            if rows[r][c] == "."
        ]
        if len(free) < 2:
            continue
        start, goal = rng.sample(free, 2)
        graph = nx.Graph()
        graph.add_nodes_from(free)
        free_set = set(free)
        for c, r in free:
            for nbr in ((c + 1, r), (c, r + 1)):
                if nbr in free_set:
                    graph.add_edge((c, r), nbr)
        if not nx.has_path(graph, start, goal):
            continue
        gx = 0.25 + 0.5 * goal[0]
        gy = 0.25 + 0.5 * goal[1]
        world = load_map(
            make_world_doc(rows, exhibits=[make_exhibit(1, gx, gy)])
        )
        sx = 0.25 + 0.5 * start[0]
        sy = 0.25 + 0.5 * start[1]
        oracle_len = nx.shortest_path_length(graph, start, goal)
        return world, Pose(sx, sy), oracle_len


# -- planning -------------------------------------------------------------------


def test_plan_same_cell_is_single_waypoint():
    world = open_floor()
    ex = make_exhibit(1, 1.25, 1.25, theta=0.5)
    world = load_map(make_world_doc(["." * 8] * 8, exhibits=[ex]))
    plan = plan_path(world, Pose(1.1, 1.1), 1)
    assert len(plan.waypoints) == 1
    assert plan.waypoints[0] == (1.25, 1.25)
    assert plan.final_heading == 0.5


def test_plan_matches_bfs_oracle_on_50_random_grids():
    for seed in range(50):
        world, start, oracle_len = random_world(seed)
        plan = plan_path(world, start, 1)
        assert len(plan.waypoints) == oracle_len + 1, f"seed {seed}"


def test_plan_walled_off_goal_raises_nopath():
    rows = ["....#.", "....#.", "....#."]
    ex = make_exhibit(1, 2.75, 0.75)
    world = load_map(make_world_doc(rows, exhibits=[ex]))
    with pytest.raises(NoPath):
        plan_path(world, Pose(0.25, 0.25), 1)


def test_plan_unknown_exhibit(world):
    with pytest.raises(UnknownExhibit):
        plan_path(world, world.start_pose(), 99)


def test_plan_waypoints_are_free_and_4_connected(world):
    plan = plan_path(world, world.start_pose(), 23)
    cells = [world.grid.cell_of(x, y) for x, y in plan.waypoints]
    for cell in cells:
        assert world.grid.is_free(cell)
    for (c1, r1), (c2, r2) in zip(cells, cells[1:]):
        assert abs(c1 - c2) + abs(r1 - r2) == 1


# -- low-level commands ------------------------------------------------------------


def test_forward_on_open_floor():
    world = open_floor()
    state = RobotState(Pose(1.0, 1.0, 0.0))
    result = apply_low_level(state, Command.FORWARD, CFG, world)
    assert not result.blocked
    assert result.state.pose == Pose(1.5, 1.0, 0.0)
    assert result.state.mode is Mode.USER_CONTROL


def test_turn_left_step_angle():
    world = open_floor()
    state = RobotState(Pose(1.0, 1.0, 0.0))
    result = apply_low_level(state, Command.TURN_LEFT, CFG, world)
    assert result.state.pose.theta == pytest.approx(math.pi / 6)
    assert result.state.pose.x == 1.0 and result.state.pose.y == 1.0


def test_forward_into_wall_clips_before_contact():
    # Wall cell starts at x = 1.0; robot 0.2 m away marching in 0.025 m
    # sub-steps must stop strictly short of the boundary.
    rows = ["..#.."]
    world = load_map(make_world_doc(rows))
    state = RobotState(Pose(0.8, 0.25, 0.0))
    result = apply_low_level(state, Command.FORWARD, CFG, world)
    advance = result.state.pose.x - 0.8
    assert result.blocked
    assert 0.0 < advance < 0.2
    assert advance >= 0.2 - 2 * (world.grid.resolution / 20.0)
    assert world.grid.is_free(
        world.grid.cell_of(result.state.pose.x, result.state.pose.y)
    )


def test_backward_is_reverse_of_forward():
    world = open_floor()
    state = RobotState(Pose(2.0, 2.0, 0.0))
    result = apply_low_level(state, Command.BACKWARD, CFG, world)
    assert result.state.pose.x == pytest.approx(1.5)
    assert result.state.pose.theta == 0.0


def test_stop_cancels_plan_and_idles(world):
    plan = plan_path(world, world.start_pose(), 4)
    state = RobotState(world.start_pose(), Mode.AUTONOMOUS, plan)
    result = apply_low_level(state, Command.STOP, CFG, world)
    assert result.state.mode is Mode.IDLE
    assert result.state.plan is None


def test_low_level_preempts_autonomous_plan(world):
    plan = plan_path(world, world.start_pose(), 4)
    state = RobotState(world.start_pose(), Mode.AUTONOMOUS, plan)
    result = apply_low_level(state, Command.TURN_LEFT, CFG, world)
    assert result.state.mode is Mode.USER_CONTROL
    assert result.state.plan is None


# -- autonomous driving ---------------------------------------------------------------


def drive_until_arrival(world, state, dt=0.1, limit=10_000):
    elapsed = 0.0
    for _ in range(limit):
        result = tick(state, dt, CFG, world)
        state = result.state
        if result.arrived_exhibit is not None:
            return state, elapsed + result.arrival_offset, result.arrived_exhibit
        elapsed += dt
    raise AssertionError("never arrived")


def test_straight_corridor_arrives_at_closed_form_time():
    world = corridor_world(goal_theta=0.0)
    plan = plan_path(world, Pose(0.75, 0.75, 0.0), 1)
    state = RobotState(Pose(0.75, 0.75, 0.0), Mode.AUTONOMOUS, plan)
    assert eta(state.pose, plan, CFG) == pytest.approx(4.0)
    state, arrival_time, exhibit = drive_until_arrival(world, state)
    assert exhibit == 1
    assert arrival_time == pytest.approx(2.0 / 0.5, abs=1e-9)
    assert state.pose.x == pytest.approx(2.75)


def test_tick_after_arrival_is_idempotent():
    world = corridor_world()
    plan = plan_path(world, Pose(0.75, 0.75, 0.0), 1)
    state = RobotState(Pose(0.75, 0.75, 0.0), Mode.AUTONOMOUS, plan)
    state, _, _ = drive_until_arrival(world, state)
    after = tick(state, 5.0, CFG, world)
    assert after.state == state
    assert after.arrived_exhibit is None


def test_quarter_turn_consumes_two_seconds_before_translation():
    # Start facing +y; the first corridor segment runs +x, so the robot
    # must rotate pi/2 at pi/4 rad/s (2.0 s) before moving.
    world = corridor_world()
    start = Pose(0.75, 0.75, math.pi / 2)
    plan = plan_path(world, start, 1)
    state = RobotState(start, Mode.AUTONOMOUS, plan)
    mid = tick(state, 1.0, CFG, world).state
    assert (mid.pose.x, mid.pose.y) == (0.75, 0.75)
    assert mid.pose.theta == pytest.approx(math.pi / 4)
    done_turn = tick(mid, 1.0, CFG, world).state
    assert done_turn.pose.theta == pytest.approx(0.0)
    assert (done_turn.pose.x, done_turn.pose.y) == (0.75, 0.75)
    moving = tick(done_turn, 1.0, CFG, world).state
    assert moving.pose.x == pytest.approx(1.25)
    assert eta(start, plan, CFG) == pytest.approx(2.0 + 4.0)


def test_eta_examples():
    world = corridor_world()
    ex = world.exhibit(1)
    single = plan_path(world, Pose(2.75, 0.75, ex.viewing_pose.theta), 1)
    assert eta(Pose(2.75, 0.75, ex.viewing_pose.theta), single, CFG) == 0.0
    straight = plan_path(world, Pose(0.75, 0.75, 0.0), 1)
    assert eta(Pose(0.75, 0.75, 0.0), straight, CFG) == pytest.approx(4.0)
    assert eta(Pose(0.75, 0.75, math.pi / 2), straight, CFG) == pytest.approx(
        (math.pi / 2) / (math.pi / 4) + 4.0
    )


def test_arrival_contract_all_fixture_exhibits(world):
    for exhibit in world.exhibits:
        plan = plan_path(world, world.start_pose(), exhibit.id)
        state = RobotState(world.start_pose(), Mode.AUTONOMOUS, plan)
        state, _, arrived = drive_until_arrival(world, state, dt=0.25)
        assert arrived == exhibit.id
        err = state.pose.distance_to(exhibit.viewing_pose)
        heading_err = abs(state.pose.theta - exhibit.viewing_pose.theta)
        assert err <= CFG.arrival_pos_tol
        assert heading_err <= CFG.arrival_heading_tol


def test_chunked_ticks_match_one_big_tick():
    world = corridor_world(goal_theta=math.pi / 2)
    start = Pose(0.75, 0.75, math.pi)
    plan = plan_path(world, start, 1)
    a = RobotState(start, Mode.AUTONOMOUS, plan)
    b = RobotState(start, Mode.AUTONOMOUS, plan)
    for _ in range(35):
        a = tick(a, 0.2, CFG, world).state
    b = tick(b, 7.0, CFG, world).state
    assert a.pose.x == pytest.approx(b.pose.x, abs=1e-9)
    assert a.pose.y == pytest.approx(b.pose.y, abs=1e-9)
    assert a.pose.theta == pytest.approx(b.pose.theta, abs=1e-9)


def test_safety_fuzz_position_cell_always_free():
    rng = random.Random(99)
    for seed in range(15):
        world, start, _ = random_world(seed + 500, width=12, height=12)
        state = RobotState(start)
        for _ in range(60):
            roll = rng.random()
            if roll < 0.5:
                cmd = rng.choice(list(Command))
                state = apply_low_level(state, cmd, CFG, world).state
            elif roll < 0.8 and state.mode is not Mode.AUTONOMOUS:
                try:
                    plan = plan_path(world, state.pose, 1)
                    state = RobotState(state.pose, Mode.AUTONOMOUS, plan)
                except NoPath:
                    pass
            else:
                state = tick(state, rng.uniform(0.05, 2.0), CFG, world).state
            cell = world.grid.cell_of(state.pose.x, state.pose.y)
            assert world.grid.is_free(cell)


def test_determinism_bit_identical_trajectories():
    world = corridor_world()
    start = Pose(0.75, 0.75, 2.0)
    plan = plan_path(world, start, 1)

    def run():
        state = RobotState(start, Mode.AUTONOMOUS, plan)
        trace = []
        for _ in range(40):
            state = tick(state, 0.17, CFG, world).state
            trace.append((state.pose.x, state.pose.y, state.pose.theta))
            result = apply_low_level(state, Command.FORWARD, CFG, world)
            state = result.state
            trace.append((state.pose.x, state.pose.y, state.pose.theta))
        return trace

    assert run() == run()


def test_motion_config_rejects_nonpositive():
    with pytest.raises(ValueError):
        MotionConfig(linear_speed=0.0)
    with pytest.raises(ValueError):
        MotionConfig(arrival_pos_tol=-0.1)


def test_robot_state_invariant():
    with pytest.raises(ValueError):
        RobotState(Pose(0, 0), Mode.AUTONOMOUS, None)
