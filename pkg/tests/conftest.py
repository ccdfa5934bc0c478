import json
from pathlib import Path

import pytest

from tourbot.gateway import ScriptedBackend
from tourbot.session import Session, SessionConfig
from tourbot.worldmap import load_map

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "tourbot" / "data"
MAP_PATH = DATA_DIR / "museum11.map"
RULES_PATH = DATA_DIR / "scripted_rules.json"
DEMO_SCRIPT = DATA_DIR / "demo_tour.script"


@pytest.fixture(scope="session")
def world():
    return load_map(MAP_PATH.read_bytes())


@pytest.fixture(scope="session")
def scripted():
    return ScriptedBackend.from_file(RULES_PATH)


@pytest.fixture
def make_session(world, scripted):
    def factory(**overrides) -> Session:
        config = SessionConfig(**overrides) if overrides else None
        return Session(world, scripted, config=config, session_id="test")

    return factory


def make_world_doc(
    rows: list[str],
    resolution: float = 0.5,
    origin: tuple[float, float] = (0.0, 0.0),
    exhibits: list[dict] | None = None,
    tour_order: list[int] | None = None,
) -> str:
    """Single-area synthetic map document for targeted geometry tests."""
    height, width = len(rows), len(rows[0])
    cells = [
        [c, r] for r in range(height) for c in range(width) if rows[r][c] == "."
    ]
    exhibits = exhibits or []
    doc = {
        "grid": {
            "resolution": resolution,
            "origin": list(origin),
            "width": width,
            "height": height,
            "rows": rows,
        },
        "areas": [{"id": "hall", "name": "Hall", "cells": cells}],
        "exhibits": exhibits,
        "tour_order": (
            tour_order if tour_order is not None else [e["id"] for e in exhibits]
        ),
    }
    return json.dumps(doc)


def make_exhibit(
    exhibit_id: int,
    x: float,
    y: float,
    theta: float = 0.0,
    name: str | None = None,
    area_id: str = "hall",
) -> dict:
    return {
        "id": exhibit_id,
        "name": name or f"Case {exhibit_id}",
        "area_id": area_id,
        "viewing_pose": {"x": x, "y": y, "theta": theta},
        "intro": f"Display case {exhibit_id} holds a notable specimen.",
        "sample_dialogue": [
            {"speaker": "guide", "text": "What do you notice here?"},
            {"speaker": "visitor", "text": "It looks unusual."},
        ],
    }
