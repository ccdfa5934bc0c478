"""HTTP surface for the operator console: session lifecycle, command posts,
snapshots, full logs, and a server-sent event stream.

Sessions created with ``clock="wall"`` tick in a background thread at the
configured rate; ``clock="manual"`` sessions only move when the client posts
to ``/advance``, which is what the test suites and headless tools use.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel, Field

from . import dialogue, navsim
from .errors import EmptyUtterance, SessionClosed
from .gateway import Backend, RemoteBackend, ScriptedBackend
from .session import Session, SessionConfig
from .worldmap import AnnotatedMap, load_map

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_MAP = DATA_DIR / "museum11.map"
DEFAULT_RULES = DATA_DIR / "scripted_rules.json"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    map_path: Path = DEFAULT_MAP
    backend_kind: Literal["scripted", "remote"] = "scripted"
    scripted_rules: Path = DEFAULT_RULES
    remote_endpoint: str | None = None
    remote_credential: str | None = None
    remote_model: str = "gpt-4"
    tick_rate: float = 10.0
    default_clock: Literal["wall", "manual"] = "wall"
    session_defaults: SessionConfig = field(default_factory=SessionConfig)
    prompt_template: Path | None = None
    console_dir: Path | None = None

    def __post_init__(self):
        if self.tick_rate <= 0:
            raise ValueError("tick_rate must be > 0")
        if self.backend_kind == "remote" and not self.remote_endpoint:
            raise ValueError("remote backend selected but no endpoint configured")

    def make_backend(self) -> Backend:
        if self.backend_kind == "remote":
            return RemoteBackend(
                endpoint=self.remote_endpoint,
                model=self.remote_model,
                credential=self.remote_credential,
            )
        return ScriptedBackend.from_file(self.scripted_rules)


class MotionOverrides(BaseModel):
    linear_speed: float | None = None
    angular_speed: float | None = None
    step_distance: float | None = None
    step_angle: float | None = None
    arrival_pos_tol: float | None = None
    arrival_heading_tol: float | None = None


class SessionOverrides(BaseModel):
    silence_threshold: float | None = None
    auto_guide: bool | None = None
    barge_in: bool | None = None
    speech_rate: float | None = None
    clock: Literal["wall", "manual"] | None = None
    motion: MotionOverrides | None = None


class CreateSessionBody(BaseModel):
    config: SessionOverrides | None = None


class UtteranceBody(BaseModel):
    text: str = Field(min_length=1)


class CommandBody(BaseModel):
    cmd: Literal["forward", "backward", "turn_left", "turn_right", "stop"]


class SuggestionResponseBody(BaseModel):
    response: Literal["accept", "reject"]


class AdvanceBody(BaseModel):
    dt: float = Field(gt=0)


@dataclass
class SessionHandle:
    session: Session
    clock: str  # "wall" | "manual"
    lock: threading.Lock = field(default_factory=threading.Lock)
    ticker: threading.Thread | None = None


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.map_text = config.map_path.read_text(encoding="utf-8")
        self.world: AnnotatedMap = load_map(self.map_text)
        self.backend = config.make_backend()
        self.template = (
            dialogue.PromptTemplate.from_file(config.prompt_template)
            if config.prompt_template
            else None
        )
        self.handles: dict[str, SessionHandle] = {}

    def make_session_config(self, overrides: SessionOverrides | None) -> SessionConfig:
        base = self.config.session_defaults
        motion = base.motion
        if overrides and overrides.motion:
            updates = {
                k: v for k, v in overrides.motion.model_dump().items() if v is not None
            }
            motion = navsim.MotionConfig(
                **{**_motion_dict(motion), **updates}
            )
        cfg = SessionConfig(
            silence_threshold=_pick(overrides, "silence_threshold", base.silence_threshold),
            auto_guide=_pick(overrides, "auto_guide", base.auto_guide),
            barge_in=_pick(overrides, "barge_in", base.barge_in),
            speech_rate=_pick(overrides, "speech_rate", base.speech_rate),
            motion=motion,
            start_pose=base.start_pose,
        )
        return cfg


def _motion_dict(m: navsim.MotionConfig) -> dict:
    return {
        "linear_speed": m.linear_speed,
        "angular_speed": m.angular_speed,
        "step_distance": m.step_distance,
        "step_angle": m.step_angle,
        "arrival_pos_tol": m.arrival_pos_tol,
        "arrival_heading_tol": m.arrival_heading_tol,
    }


def _pick(overrides, name, default):
    if overrides is None:
        return default
    value = getattr(overrides, name)
    return default if value is None else value


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    state = ServiceState(config or ServiceConfig())
    app = FastAPI(title="tourbot service")
    app.state.service = state

    def handle_of(session_id: str) -> SessionHandle:
        handle = state.handles.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return handle

    def open_handle(session_id: str) -> SessionHandle:
        handle = handle_of(session_id)
        if handle.session.closed:
            raise HTTPException(status_code=409, detail=f"session {session_id} is closed")
        return handle

    def start_ticker(handle: SessionHandle) -> None:
        dt = 1.0 / state.config.tick_rate

        def loop() -> None:
            while not handle.session.closed:
                time.sleep(dt)
                with handle.lock:
                    if handle.session.closed:
                        break
                    handle.session.advance(dt)

        handle.ticker = threading.Thread(target=loop, daemon=True)
        handle.ticker.start()

    @app.get("/map")
    def get_map() -> Response:
        return Response(content=state.map_text, media_type="application/json")

    @app.post("/sessions")
    def create_session(body: CreateSessionBody | None = None) -> dict:
        overrides = body.config if body else None
        session_id = f"s-{uuid.uuid4().hex[:10]}"
        cfg = state.make_session_config(overrides)
        session = Session(
            state.world,
            state.backend,
            config=cfg,
            session_id=session_id,
            template=state.template,
        )
        clock = _pick(overrides, "clock", state.config.default_clock)
        handle = SessionHandle(session=session, clock=clock)
        state.handles[session_id] = handle
        if clock == "wall":
            start_ticker(handle)
        start = session.robot.pose
        return {
            "session_id": session_id,
            "clock": clock,
            "start_pose": {"x": start.x, "y": start.y, "theta": start.theta},
            "map_summary": {
                "exhibits": len(state.world.exhibits),
                "areas": [a.name for a in state.world.areas],
                "tour_order": list(state.world.tour_order),
            },
        }

    @app.post("/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody) -> dict:
        handle = open_handle(session_id)
        if not body.text.strip():
            raise HTTPException(
                status_code=422,
                detail=[{"loc": ["body", "text"], "msg": "text must be non-empty"}],
            )
        try:
            with handle.lock:
                events = handle.session.submit_utterance(body.text)
        except SessionClosed as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except EmptyUtterance as exc:
            raise HTTPException(
                status_code=422,
                detail=[{"loc": ["body", "text"], "msg": str(exc)}],
            ) from exc
        return {"accepted": True, "queued": not events, "events": len(events)}

    @app.post("/sessions/{session_id}/command")
    def post_command(session_id: str, body: CommandBody) -> dict:
        handle = open_handle(session_id)
        try:
            with handle.lock:
                events = handle.session.press(navsim.Command(body.cmd))
        except SessionClosed as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"accepted": True, "events": len(events)}

    @app.post("/sessions/{session_id}/suggestion_response")
    def post_suggestion_response(
        session_id: str, body: SuggestionResponseBody
    ) -> dict:
        handle = open_handle(session_id)
        try:
            with handle.lock:
                events = handle.session.respond_suggestion(body.response == "accept")
        except SessionClosed as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"accepted": True, "events": len(events)}

    @app.post("/sessions/{session_id}/advance")
    def post_advance(session_id: str, body: AdvanceBody) -> dict:
        handle = open_handle(session_id)
        if handle.clock != "manual":
            raise HTTPException(
                status_code=409,
                detail="advance is only available on manual-clock sessions",
            )
        try:
            with handle.lock:
                events = handle.session.advance(body.dt)
                t = handle.session.clock
        except SessionClosed as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"t": t, "events": len(events)}

    @app.get("/sessions/{session_id}/snapshot")
    def get_snapshot(session_id: str) -> dict:
        handle = handle_of(session_id)
        with handle.lock:
            return handle.session.snapshot()

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str) -> PlainTextResponse:
        handle = handle_of(session_id)
        with handle.lock:
            text = handle.session.log_text()
        return PlainTextResponse(content=text, media_type="application/x-ndjson")

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str) -> dict:
        handle = open_handle(session_id)
        with handle.lock:
            handle.session.close()
        return {"closed": True, "session_id": session_id}

    @app.get("/sessions/{session_id}/stream")
    async def stream(session_id: str, since: int = 0, follow: bool = True):
        handle = handle_of(session_id)

        async def generate():
            index = max(0, since)
            last_pose = None
            poll = min(0.05, 1.0 / state.config.tick_rate)
            while True:
                with handle.lock:
                    transcript = list(handle.session.transcript[index:])
                    snap = handle.session.snapshot()
                    closed = handle.session.closed
                for event in transcript:
                    payload = {"index": index, "event": event.to_record()}
                    yield f"id: {index}\nevent: transcript\ndata: {json.dumps(payload, sort_keys=True)}\n\n"
                    index += 1
                pose_msg = {
                    "t": snap["t"],
                    "pose": snap["pose"],
                    "mode": snap["mode"],
                    "goal_exhibit_id": snap["goal_exhibit_id"],
                    "plan": snap["plan"],
                    "speaking": snap["speaking"],
                }
                if pose_msg != last_pose:
                    last_pose = pose_msg
                    yield f"event: pose\ndata: {json.dumps(pose_msg, sort_keys=True)}\n\n"
                if not follow:
                    break
                if closed:
                    # Explicit terminator so clients can tell "session over"
                    # from a dropped connection (which they should retry).
                    yield 'event: end\ndata: {"reason": "session closed"}\n\n'
                    break
                await asyncio.sleep(poll)

        return StreamingResponse(generate(), media_type="text/event-stream")

    if state.config.console_dir and state.config.console_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/console",
            StaticFiles(directory=state.config.console_dir, html=True),
            name="console",
        )

    return app
