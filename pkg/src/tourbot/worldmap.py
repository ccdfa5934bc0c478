"""Annotated museum map: occupancy grid, named areas, exhibits, tour order.

The map document is a single JSON file (see ``load_map``) so fixtures stay
diff-able. A loaded map is immutable and safe to share between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import MapParseError, MapValidationError, OccupiedCell, OutOfBounds

Cell = tuple[int, int]  # (col, row)

FREE_CHAR = "."
OCCUPIED_CHAR = "#"


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = (theta + math.pi) % math.tau
    if r == 0.0:
        return math.pi
    return r - math.pi


@dataclass(frozen=True)
class Pose:
    """World position in meters plus heading in radians, wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class GridMap:
    """Row-major occupancy grid. ``cells[row * width + col]`` is True when free."""

    resolution: float
    width: int
    height: int
    origin: tuple[float, float]
    cells: tuple[bool, ...]

    def in_bounds(self, cell: Cell) -> bool:
        col, row = cell
        return 0 <= col < self.width and 0 <= row < self.height

    def is_free(self, cell: Cell) -> bool:
        col, row = cell
        return self.cells[row * self.width + col]

    def cell_of(self, x: float, y: float) -> Cell:
        """Map a world point to its cell under half-open intervals [low, high)."""
        col = math.floor((x - self.origin[0]) / self.resolution)
        row = math.floor((y - self.origin[1]) / self.resolution)
        if not self.in_bounds((col, row)):
            raise OutOfBounds(f"point ({x}, {y}) lies outside the grid")
        return (col, row)

    def cell_center(self, cell: Cell) -> tuple[float, float]:
        col, row = cell
        return (
            self.origin[0] + (col + 0.5) * self.resolution,
            self.origin[1] + (row + 0.5) * self.resolution,
        )

    def free_cells(self) -> list[Cell]:
        return [
            (col, row)
            for row in range(self.height)
            for col in range(self.width)
            if self.cells[row * self.width + col]
        ]


@dataclass(frozen=True)
class Area:
    """Named cluster of grid cells; areas partition the free space."""

    id: str
    name: str
    cells: frozenset[Cell]


@dataclass(frozen=True)
class DialogueTurn:
    speaker: str  # "guide" | "visitor"
    text: str


@dataclass(frozen=True)
class Exhibit:
    """One display case with its curated narrative material."""

    id: int
    name: str
    area_id: str
    viewing_pose: Pose
    intro: str
    sample_dialogue: tuple[DialogueTurn, ...]
    history: str | None = None
    activities: str | None = None
    misc: str | None = None


@dataclass(frozen=True)
class AnnotatedMap:
    grid: GridMap
    areas: tuple[Area, ...]
    exhibits: tuple[Exhibit, ...]
    tour_order: tuple[int, ...]
    _area_by_cell: dict[Cell, Area] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _exhibit_by_id: dict[int, Exhibit] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        by_cell: dict[Cell, Area] = {}
        for area in self.areas:
            for cell in area.cells:
                by_cell[cell] = area
        object.__setattr__(self, "_area_by_cell", by_cell)
        object.__setattr__(
            self, "_exhibit_by_id", {ex.id: ex for ex in self.exhibits}
        )

    def exhibit(self, exhibit_id: int) -> Exhibit | None:
        return self._exhibit_by_id.get(exhibit_id)

    def area(self, area_id: str) -> Area | None:
        for area in self.areas:
            if area.id == area_id:
                return area
        return None

    def area_of_cell(self, cell: Cell) -> Area | None:
        return self._area_by_cell.get(cell)

    def start_pose(self) -> Pose:
        """Default spawn: center of the first free cell in row-major order."""
        first = self.grid.free_cells()[0]
        x, y = self.grid.cell_center(first)
        return Pose(x, y, 0.0)


def area_of(world: AnnotatedMap, pose: Pose) -> Area:
    """Area containing the pose's cell; the pose must sit on a free cell."""
    cell = world.grid.cell_of(pose.x, pose.y)
    if not world.grid.is_free(cell):
        raise OccupiedCell(f"cell {cell} is occupied")
    area = world.area_of_cell(cell)
    if area is None:  # unreachable on a validated map
        raise MapValidationError(f"free cell {cell} belongs to no area")
    return area


def nearby_exhibits(world: AnnotatedMap, pose: Pose) -> list[Exhibit]:
    """Exhibits sharing the pose's area, nearest first; ties break on id."""
    area = area_of(world, pose)
    same_area = [ex for ex in world.exhibits if ex.area_id == area.id]
    same_area.sort(key=lambda ex: (pose.distance_to(ex.viewing_pose), ex.id))
    return same_area


# -- document parsing --------------------------------------------------------


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise MapParseError(f"{context}: missing key '{key}'")
    return mapping[key]


def _parse_grid(doc: dict) -> GridMap:
    g = _require(doc, "grid", "document")
    resolution = float(_require(g, "resolution", "grid"))
    origin = _require(g, "origin", "grid")
    width = int(_require(g, "width", "grid"))
    height = int(_require(g, "height", "grid"))
    rows = _require(g, "rows", "grid")
    if not isinstance(rows, list) or not all(isinstance(r, str) for r in rows):
        raise MapParseError("grid.rows must be a list of strings")
    cells: list[bool] = []
    for r, row in enumerate(rows):
        for ch in row:
            if ch == FREE_CHAR:
                cells.append(True)
            elif ch == OCCUPIED_CHAR:
                cells.append(False)
            else:
                raise MapParseError(f"grid.rows[{r}]: unknown cell character {ch!r}")
    if len(rows) != height or any(len(r) != width for r in rows):
        raise MapValidationError(
            f"grid size mismatch: declared {width}x{height}, "
            f"rows give {len(rows)} rows"
        )
    return GridMap(
        resolution=resolution,
        width=width,
        height=height,
        origin=(float(origin[0]), float(origin[1])),
        cells=tuple(cells),
    )


def _parse_exhibit(entry: dict) -> Exhibit:
    vp = _require(entry, "viewing_pose", "exhibit")
    turns = tuple(
        DialogueTurn(speaker=str(t["speaker"]), text=str(t["text"]))
        for t in _require(entry, "sample_dialogue", "exhibit")
    )
    return Exhibit(
        id=int(_require(entry, "id", "exhibit")),
        name=str(_require(entry, "name", "exhibit")),
        area_id=str(_require(entry, "area_id", "exhibit")),
        viewing_pose=Pose(float(vp["x"]), float(vp["y"]), float(vp["theta"])),
        intro=str(_require(entry, "intro", "exhibit")),
        sample_dialogue=turns,
        history=entry.get("history"),
        activities=entry.get("activities"),
        misc=entry.get("misc"),
    )


def _validate(world: AnnotatedMap) -> None:
    grid = world.grid
    if grid.resolution <= 0:
        raise MapValidationError("grid resolution must be > 0")
    if grid.width * grid.height != len(grid.cells):
        raise MapValidationError("grid width x height does not match cell count")
    if not any(grid.cells):
        raise MapValidationError("grid has no free cell")

    seen_cells: set[Cell] = set()
    for area in world.areas:
        if not area.cells:
            raise MapValidationError(f"area '{area.id}' has no cells")
        for cell in area.cells:
            if not grid.in_bounds(cell):
                raise MapValidationError(
                    f"area '{area.id}' references out-of-bounds cell {cell}"
                )
            if cell in seen_cells:
                raise MapValidationError(
                    f"areas overlap: cell {cell} assigned twice"
                )
            seen_cells.add(cell)
    for cell in grid.free_cells():
        if cell not in seen_cells:
            raise MapValidationError(f"free cell {cell} belongs to no area")

    area_ids = {area.id for area in world.areas}
    seen_ids: set[int] = set()
    for ex in world.exhibits:
        if ex.id <= 0:
            raise MapValidationError(f"exhibit id {ex.id} is not positive")
        if ex.id in seen_ids:
            raise MapValidationError(
                f"exhibit id {ex.id} is not unique across the map"
            )
        seen_ids.add(ex.id)
        if ex.area_id not in area_ids:
            raise MapValidationError(
                f"exhibit {ex.id} references unknown area '{ex.area_id}'"
            )
        try:
            cell = grid.cell_of(ex.viewing_pose.x, ex.viewing_pose.y)
        except OutOfBounds:
            raise MapValidationError(
                f"exhibit {ex.id} viewing pose lies outside the grid"
            ) from None
        if not grid.is_free(cell):
            raise MapValidationError(
                f"exhibit {ex.id} viewing pose lies on an occupied cell"
            )
        if not ex.intro.strip():
            raise MapValidationError(f"exhibit {ex.id} intro is empty")
        if len(ex.sample_dialogue) < 2:
            raise MapValidationError(
                f"exhibit {ex.id} sample dialogue needs at least 2 turns"
            )
        for turn in ex.sample_dialogue:
            if turn.speaker not in ("guide", "visitor"):
                raise MapValidationError(
                    f"exhibit {ex.id} dialogue speaker {turn.speaker!r} unknown"
                )
        for a, b in zip(ex.sample_dialogue, ex.sample_dialogue[1:]):
            if a.speaker == b.speaker:
                raise MapValidationError(
                    f"exhibit {ex.id} sample dialogue speakers must alternate"
                )

    if world.exhibits and not world.tour_order:
        raise MapValidationError("tour order is empty")
    if len(set(world.tour_order)) != len(world.tour_order):
        raise MapValidationError("tour order contains duplicate exhibit ids")
    for exhibit_id in world.tour_order:
        if exhibit_id not in seen_ids:
            raise MapValidationError(
                f"tour order references unknown exhibit {exhibit_id}"
            )


def load_map(document: bytes | str) -> AnnotatedMap:
    """Parse and validate a map document; raises MapParseError / MapValidationError."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MapParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MapParseError("document root must be an object")

    grid = _parse_grid(doc)
    try:
        areas = tuple(
            Area(
                id=str(_require(a, "id", "area")),
                name=str(_require(a, "name", "area")),
                cells=frozenset((int(c[0]), int(c[1])) for c in a["cells"]),
            )
            for a in _require(doc, "areas", "document")
        )
        exhibits = tuple(
            _parse_exhibit(e) for e in _require(doc, "exhibits", "document")
        )
        tour_order = tuple(int(i) for i in _require(doc, "tour_order", "document"))
    except (KeyError, TypeError, ValueError) as exc:
        raise MapParseError(f"malformed document: {exc}") from exc

    world = AnnotatedMap(
        grid=grid, areas=areas, exhibits=exhibits, tour_order=tour_order
    )
    _validate(world)
    return world


def serialize_map(world: AnnotatedMap) -> str:
    """Inverse of load_map on the logical model (round-trip safe)."""
    grid = world.grid
    rows = [
        "".join(
            FREE_CHAR if grid.cells[row * grid.width + col] else OCCUPIED_CHAR
            for col in range(grid.width)
        )
        for row in range(grid.height)
    ]
    doc = {
        "grid": {
            "resolution": grid.resolution,
            "origin": list(grid.origin),
            "width": grid.width,
            "height": grid.height,
            "rows": rows,
        },
        "areas": [
            {
                "id": area.id,
                "name": area.name,
                "cells": [list(c) for c in sorted(area.cells)],
            }
            for area in world.areas
        ],
        "exhibits": [
            _exhibit_doc(ex) for ex in world.exhibits
        ],
        "tour_order": list(world.tour_order),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _exhibit_doc(ex: Exhibit) -> dict:
    entry: dict = {
        "id": ex.id,
        "name": ex.name,
        "area_id": ex.area_id,
        "viewing_pose": {
            "x": ex.viewing_pose.x,
            "y": ex.viewing_pose.y,
            "theta": ex.viewing_pose.theta,
        },
        "intro": ex.intro,
        "sample_dialogue": [
            {"speaker": t.speaker, "text": t.text} for t in ex.sample_dialogue
        ],
    }
    for key in ("history", "activities", "misc"):
        value = getattr(ex, key)
        if value is not None:
            entry[key] = value
    return entry
