"""Session transcript events and their newline-delimited log encoding.

One event per line, UTF-8 JSON with fields {t, kind, intent?, politeness?,
payload}. The field names are a published contract: the analysis tooling and
the operator console both read them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

from .errors import LogParseError


class EventKind(str, Enum):
    USER_UTTERANCE = "user_utterance"
    ROBOT_SPEECH = "robot_speech"
    NAV_COMMAND = "nav_command"
    ARRIVED = "arrived"
    SUGGESTION = "suggestion"
    ERROR = "error"


@dataclass(frozen=True)
class Event:
    t: float
    kind: EventKind
    payload: dict
    intent: str | None = None
    politeness: str | None = None

    def to_record(self) -> dict:
        record: dict = {"t": self.t, "kind": self.kind.value, "payload": self.payload}
        if self.intent is not None:
            record["intent"] = self.intent
        if self.politeness is not None:
            record["politeness"] = self.politeness
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_record(cls, record: dict) -> "Event":
        return cls(
            t=float(record["t"]),
            kind=EventKind(record["kind"]),
            payload=record.get("payload", {}),
            intent=record.get("intent"),
            politeness=record.get("politeness"),
        )


def dump_log(events: Iterable[Event], sink: IO[str]) -> None:
    for event in events:
        sink.write(event.to_json())
        sink.write("\n")


def dumps_log(events: Iterable[Event]) -> str:
    return "".join(event.to_json() + "\n" for event in events)


def load_log(data: bytes | str) -> list[Event]:
    """Parse a persisted log; LogParseError carries the 1-based line number."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    events: list[Event] = []
    for number, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            events.append(Event.from_record(record))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise LogParseError(number, str(exc)) from exc
    return events
