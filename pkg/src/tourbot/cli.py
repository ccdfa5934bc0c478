"""Command-line entry points: headless scripted runs, log analysis, and the
live service."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import shlex
import sys
from pathlib import Path

from . import analysis
from .errors import TourbotError
from .events import load_log
from .gateway import RemoteBackend, ScriptedBackend
from .navsim import Command
from .service import DEFAULT_MAP, DEFAULT_RULES, ServiceConfig, create_app
from .session import Session
from .worldmap import load_map

DEFAULT_SETTLE = 90.0  # seconds appended after the last scripted action


@dataclasses.dataclass(frozen=True)
class ScriptLine:
    number: int
    t: float
    action: str  # "say" | "press"
    value: str


class ScriptError(TourbotError):
    def __init__(self, number: int, reason: str):
        self.number = number
        super().__init__(f"script line {number}: {reason}")


def parse_script(text: str) -> list[ScriptLine]:
    """Lines are `at <t> say "<utterance>"` or `at <t> press <cmd>`;
    blank lines and #-comments are skipped. Times must not decrease."""
    lines: list[ScriptLine] = []
    last_t = 0.0
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = shlex.split(stripped)
        except ValueError as exc:
            raise ScriptError(number, f"bad quoting: {exc}") from exc
        if len(tokens) < 4 or tokens[0] != "at":
            raise ScriptError(number, "expected: at <t> say \"...\" | press <cmd>")
        try:
            t = float(tokens[1])
        except ValueError:
            raise ScriptError(number, f"bad timestamp {tokens[1]!r}") from None
        if t < last_t:
            raise ScriptError(number, f"timestamps must not decrease ({t} < {last_t})")
        action = tokens[2]
        if action == "say":
            if len(tokens) != 4 or not tokens[3].strip():
                raise ScriptError(number, "say needs exactly one quoted utterance")
            value = tokens[3]
        elif action == "press":
            value = tokens[3]
            if len(tokens) != 4 or value not in [c.value for c in Command]:
                raise ScriptError(
                    number,
                    f"press needs one of: {', '.join(c.value for c in Command)}",
                )
        else:
            raise ScriptError(number, f"unknown action {action!r}")
        last_t = t
        lines.append(ScriptLine(number, t, action, value))
    return lines


def _make_backend(args) -> ScriptedBackend | RemoteBackend:
    if args.backend == "remote":
        endpoint = args.endpoint or os.environ.get("TOURBOT_ENDPOINT")
        if not endpoint:
            sys.exit("remote backend needs --endpoint or TOURBOT_ENDPOINT")
        return RemoteBackend(
            endpoint=endpoint,
            model=args.model,
            credential=args.credential or os.environ.get("TOURBOT_CREDENTIAL"),
        )
    return ScriptedBackend.from_file(args.rules)


def cmd_run(args) -> int:
    random.seed(args.seed)
    world = load_map(Path(args.map).read_bytes())
    backend = _make_backend(args)
    try:
        script = parse_script(Path(args.script).read_text(encoding="utf-8"))
    except ScriptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    duration = args.duration
    if duration is None:
        duration = (script[-1].t if script else 0.0) + DEFAULT_SETTLE

    session = Session(world, backend, session_id="headless")
    for line in script:
        if line.t > session.clock:
            session.advance(line.t - session.clock)
        if line.action == "say":
            session.submit_utterance(line.value)
        else:
            session.press(Command(line.value))
    if duration > session.clock:
        session.advance(duration - session.clock)

    log_text = session.log_text()
    if args.out:
        Path(args.out).write_text(log_text, encoding="utf-8")
    else:
        sys.stdout.write(log_text)
    arrived = sum(1 for e in session.transcript if e.kind.value == "arrived")
    print(
        f"ran {duration:.1f}s of virtual time: {len(session.transcript)} events, "
        f"{arrived} arrivals, visited {session.suggestion.visited}",
        file=sys.stderr,
    )
    return 0


def cmd_analyze(args) -> int:
    world = load_map(Path(args.map).read_bytes()) if args.map else None
    try:
        events = load_log(Path(args.log).read_bytes())
    except TourbotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    coded = analysis.code_log(events, world)
    stats = analysis.session_stats(events, world)
    timeline = analysis.export_timeline(coded)
    if args.timeline:
        Path(args.timeline).write_text(
            json.dumps(timeline, indent=2) + "\n", encoding="utf-8"
        )
    if args.stats:
        Path(args.stats).write_text(
            json.dumps(dataclasses.asdict(stats), indent=2) + "\n", encoding="utf-8"
        )
    print(
        f"{len(coded)} utterances: {stats.n_inquiry} inquiries, "
        f"{stats.n_control} control commands ({stats.n_low} low / {stats.n_high} high), "
        f"{stats.n_accept} suggestion accepts, {stats.n_reject} rejects"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    file_cfg = {}
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    map_path = Path(
        args.map
        or os.environ.get("TOURBOT_MAP")
        or file_cfg.get("map", DEFAULT_MAP)
    )
    config = ServiceConfig(
        host=args.host or file_cfg.get("host", "127.0.0.1"),
        port=args.port or int(file_cfg.get("port", 8765)),
        map_path=map_path,
        backend_kind=args.backend or file_cfg.get("backend", "scripted"),
        scripted_rules=Path(args.rules or file_cfg.get("rules", DEFAULT_RULES)),
        remote_endpoint=args.endpoint
        or os.environ.get("TOURBOT_ENDPOINT")
        or file_cfg.get("endpoint"),
        remote_credential=args.credential
        or os.environ.get("TOURBOT_CREDENTIAL")
        or file_cfg.get("credential"),
        remote_model=args.model or file_cfg.get("model", "gpt-4"),
        tick_rate=args.tick_rate or float(file_cfg.get("tick_rate", 10.0)),
        default_clock=args.clock or file_cfg.get("clock", "wall"),
        prompt_template=(
            Path(args.template)
            if args.template
            else Path(file_cfg["template"]) if "template" in file_cfg else None
        ),
        console_dir=Path(args.console_dir) if args.console_dir else None,
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--backend", choices=["scripted", "remote"], default="scripted"
    )
    parser.add_argument("--rules", default=str(DEFAULT_RULES),
                        help="scripted backend rules file")
    parser.add_argument("--endpoint", help="remote chat-completion endpoint URL")
    parser.add_argument("--credential", help="remote endpoint credential")
    parser.add_argument("--model", default="gpt-4")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tourbot", description="Simulated narrative tour-guide robot."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scripted session headlessly")
    run.add_argument("--map", default=str(DEFAULT_MAP))
    run.add_argument("--script", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="write the transcript log here (default stdout)")
    run.add_argument("--duration", type=float,
                     help="total virtual seconds (default: last action + 90)")
    _add_backend_args(run)
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze", help="code a session log and export stats")
    an.add_argument("--log", required=True)
    an.add_argument("--timeline", help="write timeline JSON here")
    an.add_argument("--stats", help="write per-session stats JSON here")
    an.add_argument("--map", help="map file for name-aware coding")
    an.set_defaults(func=cmd_analyze)

    sv = sub.add_parser("serve", help="run the HTTP service for the console")
    sv.add_argument("--map")
    sv.add_argument("--host")
    sv.add_argument("--port", type=int)
    sv.add_argument("--backend", choices=["scripted", "remote"])
    sv.add_argument("--rules")
    sv.add_argument("--endpoint")
    sv.add_argument("--credential")
    sv.add_argument("--model")
    sv.add_argument("--tick-rate", type=float, dest="tick_rate")
    sv.add_argument("--clock", choices=["wall", "manual"])
    sv.add_argument("--template",
                    help="prompt template file to re-skin the guide persona")
    sv.add_argument("--config", help="JSON config file")
    sv.add_argument("--console-dir", help="static console assets to mount at /console")
    sv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
