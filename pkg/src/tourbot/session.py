"""One tour session: virtual clock, utterance handling, robot ticking,
silence-triggered narration, and the append-only transcript.

The session never sleeps; time only moves through ``advance``. Within an
advance the clock jumps between "interesting" instants (speech ends, arrival,
silence threshold), so ticking in big steps or small ones lands on the same
trajectory and the same timestamps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from . import analysis, dialogue, navsim
from .errors import EmptyUtterance, NoPath, SessionClosed, TourbotError
from .events import Event, EventKind, dumps_log
from .gateway import Backend
from .worldmap import AnnotatedMap, Pose

_T_EPS = 1e-12


@dataclass
class SessionConfig:
    silence_threshold: float = 45.0
    auto_guide: bool = False
    barge_in: bool = False
    speech_rate: float = 15.0  # simulated speech duration = chars / rate
    motion: navsim.MotionConfig = field(default_factory=navsim.MotionConfig)
    start_pose: Pose | None = None

    def __post_init__(self):
        if self.silence_threshold <= 0:
            raise ValueError("silence_threshold must be > 0")
        if self.speech_rate <= 0:
            raise ValueError("speech_rate must be > 0")


class Session:
    """Single-writer state machine for one visitor's tour."""

    def __init__(
        self,
        world: AnnotatedMap,
        backend: Backend,
        config: SessionConfig | None = None,
        session_id: str = "session",
        classifier: dialogue.ClassifierBackend | None = None,
        template: dialogue.PromptTemplate | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.id = session_id
        self.world = world
        self.backend = backend
        self.config = config or SessionConfig()
        self.classifier = classifier or dialogue.RuleClassifier.for_map(world)
        self.template = template or dialogue.default_template()
        self.sleep = sleep
        self.lexicon = dialogue.RuleLexicon.from_map(world)

        start = self.config.start_pose or world.start_pose()
        self.robot = navsim.RobotState(start, navsim.Mode.IDLE, None)
        self.suggestion = dialogue.SuggestionState()
        self.transcript: list[Event] = []
        self.clock = 0.0
        self.last_activity = 0.0
        self.speaking_until: float | None = None
        self.queued_utterance: str | None = None
        self.pending_suggestion: int | None = None
        self.closed = False

    # -- bookkeeping ----------------------------------------------------------

    def _require_open(self) -> None:
        if self.closed:
            raise SessionClosed(f"session {self.id} is closed")

    def is_speaking(self) -> bool:
        return self.speaking_until is not None

    def _emit(
        self,
        kind: EventKind,
        payload: dict,
        intent: str | None = None,
        politeness: str | None = None,
    ) -> Event:
        event = Event(
            t=self.clock, kind=kind, payload=payload,
            intent=intent, politeness=politeness,
        )
        self.transcript.append(event)
        return event

    def _speak(self, text: str, cause: str) -> None:
        self._emit(EventKind.ROBOT_SPEECH, {"text": text, "cause": cause})
        base = self.speaking_until if self.speaking_until is not None else self.clock
        self.speaking_until = base + max(len(text), 1) / self.config.speech_rate

    def _ctx(self) -> dialogue.HandlerContext:
        return dialogue.HandlerContext(
            world=self.world,
            robot_pose=self.robot.pose,
            backend=self.backend,
            suggestion=self.suggestion,
            template=self.template,
            goal_exhibit_id=self.robot.goal_exhibit_id,
            lexicon=self.lexicon,
            sleep=self.sleep,
        )

    # -- commands --------------------------------------------------------------

    def submit_utterance(self, text: str) -> list[Event]:
        """Handle one visitor utterance, or queue it while the robot speaks.

        The queue has depth one and the newest utterance wins; queued text is
        applied the instant the current speech ends.
        """
        self._require_open()
        if not text.strip():
            raise EmptyUtterance("utterance is empty after trimming")
        before = len(self.transcript)
        self.last_activity = self.clock
        if self.is_speaking():
            if not self.config.barge_in:
                self.queued_utterance = text
                return []
            self.speaking_until = None  # barge-in cuts the speech short
        self._process_utterance(text)
        return self.transcript[before:]

    def press(self, cmd: navsim.Command) -> list[Event]:
        """Console button press; applies immediately (it does not go through
        speech capture, so an ongoing robot speech does not block it)."""
        self._require_open()
        before = len(self.transcript)
        self.last_activity = self.clock
        self._execute_directional(cmd)
        return self.transcript[before:]

    def respond_suggestion(self, accept: bool) -> list[Event]:
        """Accept or decline the standing suggestion via the console controls."""
        self._require_open()
        before = len(self.transcript)
        if self.pending_suggestion is None:
            return self.transcript[before:]
        self.last_activity = self.clock
        suggested = self.pending_suggestion
        self.pending_suggestion = None
        if accept:
            self._navigate_to(suggested, confirmed=True)
        else:
            self._speak(
                "No problem, we can stay here. Tell me when you want to move on.",
                cause="suggestion_reply",
            )
        return self.transcript[before:]

    def close(self) -> None:
        self.closed = True

    # -- utterance pipeline ------------------------------------------------------

    def _process_utterance(self, text: str) -> None:
        try:
            intent = dialogue.classify(text, self.classifier)
        except TourbotError as exc:
            self._emit(EventKind.ERROR, {"message": str(exc), "source": "classifier"})
            self._speak(dialogue.FALLBACK_SPEECH, cause="error")
            return
        politeness = analysis.code_politeness(text)
        self._emit(
            EventKind.USER_UTTERANCE,
            {"text": text},
            intent=intent.value,
            politeness=politeness.value,
        )

        if (
            self.pending_suggestion is not None
            and intent in dialogue.CONVERSATIONAL_INTENTS
        ):
            suggested = self.pending_suggestion
            if dialogue.is_negative(text):
                self.pending_suggestion = None
                self._speak(
                    "No problem, we can stay here. Tell me when you want to move on.",
                    cause="suggestion_reply",
                )
                return
            if dialogue.is_affirmative(text):
                self.pending_suggestion = None
                self._navigate_to(suggested, confirmed=True)
                return

        action = dialogue.handle(intent, text, self._ctx())
        self._apply_action(action)

    def _apply_action(self, action: dialogue.Action) -> None:
        if action.error is not None:
            self._emit(EventKind.ERROR, {"message": action.error, "source": "handler"})
        if action.goal is not None:
            self._execute_goal(action.goal)
        if action.speech is not None:
            self._speak(action.speech, cause="reply")

    def _execute_goal(self, goal: dialogue.NavGoal) -> None:
        self.pending_suggestion = None
        if goal.kind is dialogue.GoalKind.DIRECTIONAL:
            self._execute_directional(goal.command)
            return
        if goal.kind is dialogue.GoalKind.SPECIFIC_EXHIBIT:
            self._start_navigation(goal.exhibit_id)
            return
        raise ValueError(f"unresolved goal kind: {goal.kind}")

    def _execute_directional(self, cmd: navsim.Command) -> None:
        result = navsim.apply_low_level(
            self.robot, cmd, self.config.motion, self.world
        )
        self.robot = result.state
        self._emit(
            EventKind.NAV_COMMAND,
            {"action": "low_level", "command": cmd.value, "blocked": result.blocked},
        )

    def _start_navigation(self, exhibit_id: int) -> None:
        try:
            plan = navsim.plan_path(self.world, self.robot.pose, exhibit_id)
        except (NoPath, TourbotError) as exc:
            self._emit(EventKind.ERROR, {"message": str(exc), "source": "planner"})
            self._speak("I can't find a way there from here.", cause="error")
            return
        self.robot = navsim.RobotState(self.robot.pose, navsim.Mode.AUTONOMOUS, plan)
        self._emit(EventKind.NAV_COMMAND, {"action": "goto", "exhibit_id": exhibit_id})

    def _navigate_to(self, exhibit_id: int, confirmed: bool) -> None:
        exhibit = self.world.exhibit(exhibit_id)
        self._start_navigation(exhibit_id)
        if exhibit is not None and self.robot.mode is navsim.Mode.AUTONOMOUS:
            lead = "Great, let's head over to" if confirmed else "Taking you to"
            self._speak(
                f"{lead} exhibit {exhibit_id}, {exhibit.name}.", cause="reply"
            )

    # -- time ---------------------------------------------------------------------

    def advance(self, dt: float) -> list[Event]:
        """Move the virtual clock forward, driving motion, arrivals, queued
        utterances, and proactive chat at their exact instants."""
        self._require_open()
        if dt < 0:
            raise ValueError("dt must be >= 0")
        before = len(self.transcript)
        end = self.clock + dt
        while True:
            self._fire_due()
            if self.clock >= end - _T_EPS:
                break
            t_next = self._next_boundary(end)
            step = t_next - self.clock
            arrived: int | None = None
            if self.robot.mode is navsim.Mode.AUTONOMOUS and step > 0:
                result = navsim.tick(
                    self.robot, step, self.config.motion, self.world
                )
                self.robot = result.state
                arrived = result.arrived_exhibit
            self.clock = t_next
            if arrived is not None:
                self._on_arrival(arrived)
        return self.transcript[before:]

    def _next_boundary(self, end: float) -> float:
        candidates = [end]
        if self.speaking_until is not None and self.speaking_until > self.clock:
            candidates.append(self.speaking_until)
        if not self.is_speaking():
            due_at = self.last_activity + self.config.silence_threshold
            if due_at > self.clock:
                candidates.append(due_at)
        if self.robot.mode is navsim.Mode.AUTONOMOUS:
            remaining = navsim.eta(
                self.robot.pose, self.robot.plan, self.config.motion
            )
            arrival_at = self.clock + remaining
            if arrival_at > self.clock:
                candidates.append(arrival_at)
        return min(candidates)

    def _fire_due(self) -> None:
        if (
            self.speaking_until is not None
            and self.clock >= self.speaking_until - _T_EPS
        ):
            finished_at = self.speaking_until
            self.speaking_until = None
            self.last_activity = max(self.last_activity, finished_at)
            if self.queued_utterance is not None:
                text = self.queued_utterance
                self.queued_utterance = None
                self._process_utterance(text)
        if not self.is_speaking() and dialogue.proactive_due(
            self.clock,
            self.last_activity,
            self.config.silence_threshold,
            robot_speaking=self.is_speaking(),
        ):
            self._fire_proactive()

    def _on_arrival(self, exhibit_id: int) -> None:
        exhibit = self.world.exhibit(exhibit_id)
        self.suggestion.mark_visited(exhibit_id)
        self._emit(
            EventKind.ARRIVED, {"exhibit_id": exhibit_id, "name": exhibit.name}
        )
        self._speak(
            f"Here we are: exhibit {exhibit_id}, {exhibit.name}. {exhibit.intro}",
            cause="arrival",
        )

    def _fire_proactive(self) -> None:
        suggested: int | None = None
        if self.robot.mode is not navsim.Mode.AUTONOMOUS:
            suggested = dialogue.suggest_next(self.suggestion, self.world.tour_order)
        text = dialogue.proactive_chat(self._ctx(), tuple(self.suggestion.visited))
        if suggested is None:
            self._speak(text, cause="proactive")
            return
        exhibit = self.world.exhibit(suggested)
        self._emit(
            EventKind.SUGGESTION,
            {"exhibit_id": suggested, "name": exhibit.name},
        )
        if self.config.auto_guide:
            self._speak(
                f"{text} Let's move on to exhibit {suggested}, {exhibit.name}.",
                cause="proactive",
            )
            self._start_navigation(suggested)
        else:
            self.pending_suggestion = suggested
            self._speak(
                f"{text} How about we head to exhibit {suggested}, "
                f"{exhibit.name}, next?",
                cause="proactive",
            )

    # -- views -----------------------------------------------------------------

    def snapshot(self) -> dict:
        """Read-only value copy for publication to the console."""
        pose = self.robot.pose
        plan = self.robot.plan
        return {
            "session_id": self.id,
            "t": self.clock,
            "pose": {"x": pose.x, "y": pose.y, "theta": pose.theta},
            "mode": self.robot.mode.value,
            "goal_exhibit_id": self.robot.goal_exhibit_id,
            "speaking": self.is_speaking(),
            "speaking_until": self.speaking_until,
            "visited": list(self.suggestion.visited),
            "pending_suggestion": self.pending_suggestion,
            "event_count": len(self.transcript),
            "plan": [list(w) for w in plan.waypoints] if plan else [],
            "closed": self.closed,
            "last_events": [e.to_record() for e in self.transcript[-5:]],
        }

    def log_text(self) -> str:
        return dumps_log(self.transcript)

    def persist(self, sink) -> None:
        sink.write(self.log_text())


def check_transcript_monotone(events: list[Event]) -> bool:
    return all(a.t <= b.t for a, b in zip(events, events[1:]))
