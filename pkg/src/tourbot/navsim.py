"""Robot motion simulator: shortest-path planning over the occupancy grid,
low-level directional commands, and deterministic autonomous driving.

The motion model is turn-then-translate on a 4-connected grid with a point
robot, so travel times have closed forms and ``tick`` is exact regardless of
how the caller chunks time.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .errors import NoPath, OccupiedCell, OutOfBounds, UnknownExhibit
from .worldmap import AnnotatedMap, Cell, Pose, normalize_angle

_EPS = 1e-9        # geometric slack (meters / radians)
_TIME_EPS = 1e-9   # snap phases that complete within a nanosecond of dt


class Mode(str, Enum):
    IDLE = "idle"
    AUTONOMOUS = "autonomous"
    USER_CONTROL = "user_control"


class Command(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    STOP = "stop"


@dataclass(frozen=True)
class MotionConfig:
    linear_speed: float = 0.5            # m/s
    angular_speed: float = math.pi / 4   # rad/s
    step_distance: float = 0.5           # m per forward/backward press
    step_angle: float = math.pi / 6      # rad per turn press
    arrival_pos_tol: float = 0.1         # m
    arrival_heading_tol: float = math.radians(5.0)

    def __post_init__(self):
        for name in (
            "linear_speed", "angular_speed", "step_distance",
            "step_angle", "arrival_pos_tol", "arrival_heading_tol",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class Plan:
    """Waypoints are free-cell centers; the last one is the exact viewing
    position inside the goal cell."""

    waypoints: tuple[tuple[float, float], ...]
    final_heading: float
    goal_exhibit_id: int


@dataclass(frozen=True)
class RobotState:
    pose: Pose
    mode: Mode = Mode.IDLE
    plan: Plan | None = None

    def __post_init__(self):
        if (self.mode is Mode.AUTONOMOUS) != (self.plan is not None):
            raise ValueError("active plan and autonomous mode must coincide")

    @property
    def goal_exhibit_id(self) -> int | None:
        return self.plan.goal_exhibit_id if self.plan else None


@dataclass(frozen=True)
class StepResult:
    state: RobotState
    blocked: bool


@dataclass(frozen=True)
class TickResult:
    state: RobotState
    arrived_exhibit: int | None = None
    arrival_offset: float | None = None  # seconds into the tick


def _free_cell_of(world: AnnotatedMap, x: float, y: float) -> Cell:
    cell = world.grid.cell_of(x, y)
    if not world.grid.is_free(cell):
        raise OccupiedCell(f"cell {cell} is occupied")
    return cell


def plan_path(world: AnnotatedMap, start: Pose, goal_exhibit_id: int) -> Plan:
    """Shortest 4-connected route (by cell count) to an exhibit viewing pose."""
    exhibit = world.exhibit(goal_exhibit_id)
    if exhibit is None:
        raise UnknownExhibit(f"exhibit {goal_exhibit_id} is not on the map")
    grid = world.grid
    start_cell = _free_cell_of(world, start.x, start.y)
    goal_cell = grid.cell_of(exhibit.viewing_pose.x, exhibit.viewing_pose.y)

    parents: dict[Cell, Cell | None] = {start_cell: None}
    queue: deque[Cell] = deque([start_cell])
    while queue:
        cell = queue.popleft()
        if cell == goal_cell:
            break
        col, row = cell
        for nxt in ((col + 1, row), (col - 1, row), (col, row + 1), (col, row - 1)):
            if nxt not in parents and grid.in_bounds(nxt) and grid.is_free(nxt):
                parents[nxt] = cell
                queue.append(nxt)
    if goal_cell not in parents:
        raise NoPath(
            f"no free route from {start_cell} to exhibit {goal_exhibit_id}"
        )

    cells: list[Cell] = []
    cursor: Cell | None = goal_cell
    while cursor is not None:
        cells.append(cursor)
        cursor = parents[cursor]
    cells.reverse()

    waypoints = [grid.cell_center(c) for c in cells[:-1]]
    waypoints.append((exhibit.viewing_pose.x, exhibit.viewing_pose.y))
    return Plan(
        waypoints=tuple(waypoints),
        final_heading=exhibit.viewing_pose.theta,
        goal_exhibit_id=goal_exhibit_id,
    )


def _march(
    world: AnnotatedMap, pose: Pose, distance: float, direction: float
) -> tuple[float, bool]:
    """Ray-march along the heading; returns (collision-free distance, blocked)."""
    substep = world.grid.resolution / 20.0
    dx, dy = math.cos(direction), math.sin(direction)
    steps = max(1, math.ceil(distance / substep))
    good = 0.0
    for i in range(1, steps + 1):
        d = min(i * substep, distance)
        x, y = pose.x + dx * d, pose.y + dy * d
        try:
            if not world.grid.is_free(world.grid.cell_of(x, y)):
                return good, True
        except OutOfBounds:
            return good, True
        good = d
    return good, False


def apply_low_level(
    state: RobotState, cmd: Command, cfg: MotionConfig, world: AnnotatedMap
) -> StepResult:
    """One directional press. Preempts any active plan; never raises."""
    pose = state.pose
    if cmd is Command.STOP:
        return StepResult(RobotState(pose, Mode.IDLE, None), False)
    if cmd in (Command.TURN_LEFT, Command.TURN_RIGHT):
        sign = 1.0 if cmd is Command.TURN_LEFT else -1.0
        new = Pose(pose.x, pose.y, pose.theta + sign * cfg.step_angle)
        return StepResult(RobotState(new, Mode.USER_CONTROL, None), False)

    direction = pose.theta if cmd is Command.FORWARD else pose.theta + math.pi
    dist, blocked = _march(world, pose, cfg.step_distance, direction)
    new = Pose(
        pose.x + math.cos(direction) * dist,
        pose.y + math.sin(direction) * dist,
        pose.theta,
    )
    return StepResult(RobotState(new, Mode.USER_CONTROL, None), blocked)


def tick(
    state: RobotState, dt: float, cfg: MotionConfig, world: AnnotatedMap
) -> TickResult:
    """Advance autonomous driving by dt seconds.

    Motion is consumed phase by phase (rotate, translate, final rotate), so
    splitting dt across calls lands on identical trajectories. On completing
    the final rotation the robot reports the exhibit it arrived at along with
    the exact offset of that instant inside dt.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if state.mode is not Mode.AUTONOMOUS:
        return TickResult(state)

    plan = state.plan
    assert plan is not None
    x, y, th = state.pose.x, state.pose.y, state.pose.theta
    pending = list(plan.waypoints)
    consumed = 0.0
    remaining = dt

    while True:
        if pending:
            tx, ty = pending[0]
            dist = math.hypot(tx - x, ty - y)
            if dist <= _EPS:
                pending.pop(0)
                continue
            desired = math.atan2(ty - y, tx - x)
            turn = normalize_angle(desired - th)
            if abs(turn) > _EPS:
                t_rot = abs(turn) / cfg.angular_speed
                if remaining >= t_rot - _TIME_EPS:
                    th = desired
                    spent = min(t_rot, remaining)
                    consumed += spent
                    remaining -= spent
                elif remaining > 0:
                    th = normalize_angle(
                        th + math.copysign(cfg.angular_speed * remaining, turn)
                    )
                    consumed += remaining
                    remaining = 0.0
                    break
                else:
                    break
            else:
                th = desired
                t_move = dist / cfg.linear_speed
                if remaining >= t_move - _TIME_EPS:
                    x, y = tx, ty
                    pending.pop(0)
                    spent = min(t_move, remaining)
                    consumed += spent
                    remaining -= spent
                elif remaining > 0:
                    x += math.cos(th) * cfg.linear_speed * remaining
                    y += math.sin(th) * cfg.linear_speed * remaining
                    consumed += remaining
                    remaining = 0.0
                    break
                else:
                    break
        else:
            turn = normalize_angle(plan.final_heading - th)
            if abs(turn) > _EPS:
                t_rot = abs(turn) / cfg.angular_speed
                if remaining >= t_rot - _TIME_EPS:
                    th = plan.final_heading
                    consumed += min(t_rot, remaining)
                elif remaining > 0:
                    th = normalize_angle(
                        th + math.copysign(cfg.angular_speed * remaining, turn)
                    )
                    consumed += remaining
                    break
                else:
                    break
            else:
                th = plan.final_heading
            arrived = RobotState(Pose(x, y, th), Mode.IDLE, None)
            return TickResult(arrived, plan.goal_exhibit_id, consumed)

    new_plan = Plan(tuple(pending), plan.final_heading, plan.goal_exhibit_id)
    new_state = RobotState(Pose(x, y, th), Mode.AUTONOMOUS, new_plan)
    return TickResult(new_state)


def eta(pose: Pose, plan: Plan, cfg: MotionConfig) -> float:
    """Exact travel time for the simulator's turn-then-translate model."""
    x, y, th = pose.x, pose.y, pose.theta
    total = 0.0
    for tx, ty in plan.waypoints:
        dist = math.hypot(tx - x, ty - y)
        if dist <= _EPS:
            continue
        desired = math.atan2(ty - y, tx - x)
        total += abs(normalize_angle(desired - th)) / cfg.angular_speed
        total += dist / cfg.linear_speed
        x, y, th = tx, ty, desired
    total += abs(normalize_angle(plan.final_heading - th)) / cfg.angular_speed
    return total
