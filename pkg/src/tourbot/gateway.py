"""Uniform access to language-model backends.

Two backends share one calling convention: a remote chat-completion endpoint
(any OpenAI-compatible server) and a deterministic scripted backend that
replays canned responses for tests and offline demos.
"""

from __future__ import annotations

import json
import logging
import random
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import httpx

from .errors import GatewayTimeout, ParseFailure, RemoteError

log = logging.getLogger(__name__)

DEFAULT_DEADLINE = 20.0
BACKOFF_BASE = 0.25
BACKOFF_CAP = 0.5


@dataclass(frozen=True)
class GatewayRequest:
    system_text: str
    user_text: str
    max_tokens: int = 400
    temperature: float = 0.2
    deadline: float = DEFAULT_DEADLINE

    def __post_init__(self):
        if not self.system_text or not self.user_text:
            raise ValueError("system_text and user_text must be non-empty")
        if self.deadline <= 0:
            raise ValueError("deadline must be > 0")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")


class Backend(Protocol):
    def complete(self, req: GatewayRequest) -> str: ...

    def fields_for(self, req: GatewayRequest) -> dict | None: ...


@dataclass(frozen=True)
class ScriptedRule:
    match: str
    response: str
    regex: bool = False
    fields: dict | None = None

    def matches(self, text: str) -> bool:
        if self.regex:
            return re.search(self.match, text) is not None
        return self.match.lower() in text.lower()


@dataclass
class ScriptedBackend:
    """First-match-wins canned responses; total thanks to the default rule."""

    rules: list[ScriptedRule] = field(default_factory=list)
    default_response: str = "I'm not sure, but happy to talk about the exhibits."

    @classmethod
    def from_file(cls, path) -> "ScriptedBackend":
        from pathlib import Path

        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = [
            ScriptedRule(
                match=r["match"],
                response=r.get("response", ""),
                regex=bool(r.get("regex", False)),
                fields=r.get("fields"),
            )
            for r in doc.get("rules", [])
        ]
        return cls(rules=rules, default_response=doc.get("default", cls.default_response))

    def _rule_for(self, req: GatewayRequest) -> ScriptedRule | None:
        for rule in self.rules:
            if rule.matches(req.user_text):
                return rule
        return None

    def complete(self, req: GatewayRequest) -> str:
        rule = self._rule_for(req)
        return rule.response if rule and rule.response else self.default_response

    def fields_for(self, req: GatewayRequest) -> dict | None:
        rule = self._rule_for(req)
        return dict(rule.fields) if rule and rule.fields is not None else None


@dataclass
class RemoteBackend:
    """Chat-completion endpoint speaking the common JSON wire format."""

    endpoint: str
    model: str = "gpt-4"
    credential: str | None = None
    client: httpx.Client | None = None

    def _post(self, payload: dict, deadline: float) -> dict:
        headers = {"content-type": "application/json"}
        if self.credential:
            headers["authorization"] = f"Bearer {self.credential}"
        client = self.client or httpx.Client()
        try:
            response = client.post(
                self.endpoint, json=payload, headers=headers, timeout=deadline
            )
        except httpx.TimeoutException as exc:
            raise GatewayTimeout(f"no answer within {deadline}s") from exc
        except httpx.HTTPError as exc:
            raise GatewayTimeout(f"endpoint unreachable: {exc}") from exc
        finally:
            if self.client is None:
                client.close()
        if response.status_code // 100 != 2:
            log.error("gateway error %s: %s", response.status_code, response.text)
            raise RemoteError(response.status_code, response.text)
        return response.json()

    def complete(self, req: GatewayRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "max_tokens": req.max_tokens,
            "temperature": req.temperature,
        }
        body = self._post(payload, req.deadline)
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise RemoteError(200, f"malformed completion body: {body!r}") from exc
        return str(text)

    def fields_for(self, req: GatewayRequest) -> dict | None:
        # Remote extraction parses the completion as JSON instead of relying
        # on vendor-specific function-calling envelopes.
        text = self.complete(req)
        try:
            parsed = json.loads(text)
        except json.JSONDecodeError:
            match = re.search(r"\{.*\}", text, re.DOTALL)
            if match is None:
                return None
            try:
                parsed = json.loads(match.group(0))
            except json.JSONDecodeError:
                return None
        return parsed if isinstance(parsed, dict) else None


def _with_retry(call: Callable[[], object], sleep: Callable[[float], None]):
    try:
        return call()
    except (GatewayTimeout, RemoteError) as first:
        backoff = min(BACKOFF_BASE * (1.0 + random.random()), BACKOFF_CAP)
        log.warning("gateway call failed (%s); retrying in %.2fs", first, backoff)
        sleep(backoff)
        return call()


def complete(
    req: GatewayRequest,
    backend: Backend,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """One completion, retried once with jittered backoff on gateway errors."""
    text = _with_retry(lambda: backend.complete(req), sleep)
    if not str(text).strip():
        raise RemoteError(200, "backend returned empty text")
    return str(text)


def extract_structured(
    req: GatewayRequest,
    schema: dict[str, type],
    backend: Backend,
    sleep: Callable[[float], None] = time.sleep,
) -> dict:
    """Structured field extraction against a {name: type} schema.

    The scripted backend serves fields straight from the matching rule; the
    remote backend asks for a JSON object and parses the reply.
    """
    if not schema:
        raise ValueError("schema must name at least one field")
    raw = _with_retry(lambda: backend.fields_for(req), sleep)
    if raw is None:
        raise ParseFailure(sorted(schema))
    missing = [name for name in schema if name not in raw]
    if missing:
        raise ParseFailure(sorted(missing))
    out = {}
    for name, typ in schema.items():
        try:
            out[name] = typ(raw[name])
        except (TypeError, ValueError) as exc:
            raise ParseFailure([name]) from exc
    return out
