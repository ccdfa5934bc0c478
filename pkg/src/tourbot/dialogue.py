"""Location-aware dialogue: intent classification, navigation-goal extraction,
next-stop suggestions, prompt assembly, and proactive small talk.

Two classifier backends share one interface. The rule-based one is a pure
function over a lexicon derived from the loaded map and serves as the offline
default and test oracle; the LLM-backed one delegates to a gateway backend
and insists on receiving one of the five labels verbatim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol

from . import gateway
from .errors import AmbiguousGoal, BackendError, EmptyUtterance, GatewayError, UnknownExhibit
from .navsim import Command
from .worldmap import AnnotatedMap, Exhibit, Pose, area_of, nearby_exhibits


class Intent(str, Enum):
    INQUIRY = "inquiry_about_museum"
    COMMENT = "comment"
    FREE_CHAT = "free_chat"
    LOW_LEVEL = "low_level_control"
    HIGH_LEVEL = "high_level_control"


CONVERSATIONAL_INTENTS = frozenset(
    {Intent.INQUIRY, Intent.COMMENT, Intent.FREE_CHAT}
)

# -- text normalization -------------------------------------------------------

_APOSTROPHES = re.compile("['‘’`]")
_NON_WORD = re.compile(r"[^a-z0-9]+")


def normalize(text: str) -> list[str]:
    """Lowercase tokens with punctuation stripped; apostrophes vanish so
    "let's" becomes "lets"."""
    lowered = _APOSTROPHES.sub("", text.lower())
    return [t for t in _NON_WORD.split(lowered) if t]


def contains_phrase(tokens: list[str], phrase: tuple[str, ...]) -> bool:
    n = len(phrase)
    return any(tuple(tokens[i : i + n]) == phrase for i in range(len(tokens) - n + 1))


def _phrases(*texts: str) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(t.split()) for t in texts)


# Order matters: first matching phrase decides the directional command.
DIRECTIONAL_LEXICON: tuple[tuple[tuple[str, ...], Command], ...] = (
    (("turn", "left"), Command.TURN_LEFT),
    (("turn", "right"), Command.TURN_RIGHT),
    (("back", "up"), Command.BACKWARD),
    (("backwards",), Command.BACKWARD),
    (("backward",), Command.BACKWARD),
    (("forward",), Command.FORWARD),
    (("closer",), Command.FORWARD),
    (("stop",), Command.STOP),
)

MOTION_VERB_PHRASES = _phrases("go", "take", "show", "bring", "move on", "navigate")

INTERROGATIVE_STARTS = frozenset(
    "what whats who where when why how which can could would will "
    "do does did is are am was were shall should may".split()
)

CORE_MUSEUM_VOCAB = frozenset(
    "mineral minerals rock rocks fossil fossils exhibit exhibits exhibition "
    "museum geology geological meteorite meteorites stone stones crystal "
    "crystals gem gems specimen specimens dinosaur dinosaurs ore ores".split()
)

AFFIRMATIVE_PHRASES = _phrases(
    "yes", "yeah", "yep", "sure", "ok", "okay", "sounds good", "lets go",
    "go ahead", "of course",
)

NEGATIVE_PHRASES = _phrases(
    "no", "nope", "nah", "not", "dont", "do not", "later", "skip",
    "rather", "somewhere else",
)

_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60,
    "seventy": 70, "eighty": 80, "ninety": 90,
}


def _number_at(tokens: list[str], i: int) -> int | None:
    tok = tokens[i]
    if tok.isdigit():
        return int(tok)
    if tok in _UNITS:
        return _UNITS[tok]
    if tok in _TEENS:
        return _TEENS[tok]
    if tok in _TENS:
        value = _TENS[tok]
        if i + 1 < len(tokens) and tokens[i + 1] in _UNITS:
            value += _UNITS[tokens[i + 1]]
        return value
    return None


def directional_command(tokens: list[str]) -> Command | None:
    for phrase, cmd in DIRECTIONAL_LEXICON:
        if contains_phrase(tokens, phrase):
            return cmd
    return None


def exhibit_number(tokens: list[str]) -> int | None:
    """Number following the word "exhibit" ("exhibit 13", "exhibit number 13",
    "exhibit four")."""
    for i, tok in enumerate(tokens):
        if tok in ("exhibit", "exhibits"):
            j = i + 1
            if j < len(tokens) and tokens[j] == "number":
                j += 1
            if j < len(tokens):
                value = _number_at(tokens, j)
                if value is not None:
                    return value
    return None


def any_number(tokens: list[str]) -> int | None:
    for i in range(len(tokens)):
        value = _number_at(tokens, i)
        if value is not None:
            return value
    return None


# -- lexicon derived from the loaded map --------------------------------------

_STOP_TOKENS = frozenset("the a an of and with for".split())


@dataclass(frozen=True)
class NameEntry:
    exhibit_id: int
    phrase: tuple[str, ...]
    distinctive: frozenset[str]


@dataclass(frozen=True)
class RuleLexicon:
    museum_vocab: frozenset[str]
    area_words: frozenset[str]
    names: tuple[NameEntry, ...]

    @classmethod
    def from_map(cls, world: AnnotatedMap | None) -> "RuleLexicon":
        if world is None:
            return cls(CORE_MUSEUM_VOCAB, frozenset(), ())
        area_words = frozenset(
            tok for area in world.areas for tok in normalize(area.name)
            if tok not in _STOP_TOKENS
        )
        names = []
        vocab = set(CORE_MUSEUM_VOCAB) | set(area_words)
        for ex in world.exhibits:
            phrase = tuple(normalize(ex.name))
            toks = {t for t in phrase if len(t) >= 3 and t not in _STOP_TOKENS}
            vocab |= toks
            distinctive = frozenset(
                t for t in toks
                if len(t) >= 4 and t not in CORE_MUSEUM_VOCAB and t not in area_words
            )
            names.append(NameEntry(ex.id, phrase, distinctive))
        return cls(frozenset(vocab), area_words, tuple(names))

    def name_candidates(self, tokens: list[str]) -> list[int]:
        token_set = set(tokens)
        hits = []
        for entry in self.names:
            if contains_phrase(tokens, entry.phrase) or (token_set & entry.distinctive):
                hits.append(entry.exhibit_id)
        return sorted(set(hits))

    def has_place_reference(self, tokens: list[str]) -> bool:
        if "next" in tokens or "around" in tokens:
            return True
        if exhibit_number(tokens) is not None:
            return True
        if set(tokens) & self.area_words:
            return True
        return bool(self.name_candidates(tokens))

    def has_museum_vocab(self, tokens: list[str]) -> bool:
        return bool(set(tokens) & self.museum_vocab)


# -- classifiers ---------------------------------------------------------------


class ClassifierBackend(Protocol):
    def classify(self, utterance: str) -> Intent: ...


@dataclass(frozen=True)
class RuleClassifier:
    """Deterministic keyword classifier; precedence low > high > inquiry >
    comment > free chat."""

    lexicon: RuleLexicon = field(default_factory=lambda: RuleLexicon.from_map(None))

    @classmethod
    def for_map(cls, world: AnnotatedMap | None) -> "RuleClassifier":
        return cls(RuleLexicon.from_map(world))

    def classify(self, utterance: str) -> Intent:
        tokens = normalize(utterance)
        if not tokens:
            raise EmptyUtterance("utterance is empty after trimming")
        has_ref = self.lexicon.has_place_reference(tokens)
        if directional_command(tokens) is not None and not has_ref:
            return Intent.LOW_LEVEL
        if has_ref and any(
            contains_phrase(tokens, verb) for verb in MOTION_VERB_PHRASES
        ):
            return Intent.HIGH_LEVEL
        question = (
            utterance.rstrip().endswith("?")
            or tokens[0] in INTERROGATIVE_STARTS
            or contains_phrase(tokens, ("tell", "me"))
        )
        has_vocab = self.lexicon.has_museum_vocab(tokens)
        if question and has_vocab:
            return Intent.INQUIRY
        if not question and has_vocab:
            return Intent.COMMENT
        return Intent.FREE_CHAT


_LABELS = {intent.value: intent for intent in Intent}

_CLASSIFY_INSTRUCTIONS = (
    "You label visitor utterances for a museum tour-guide robot. Reply with "
    "exactly one of these labels and nothing else: "
    + ", ".join(sorted(_LABELS))
    + ". Navigation by direction words is low_level_control; asking to be "
    "taken somewhere is high_level_control; questions about the museum are "
    "inquiry_about_museum; remarks about the museum are comment; anything "
    "else is free_chat."
)


@dataclass
class LlmClassifier:
    """Asks a gateway backend for a label; retries once on an invalid label."""

    backend: gateway.Backend
    deadline: float = gateway.DEFAULT_DEADLINE
    sleep: Callable[[float], None] = __import__("time").sleep

    def classify(self, utterance: str) -> Intent:
        if not utterance.strip():
            raise EmptyUtterance("utterance is empty after trimming")
        req = gateway.GatewayRequest(
            system_text=_CLASSIFY_INSTRUCTIONS,
            user_text=utterance,
            temperature=0.0,
            deadline=self.deadline,
        )
        last = ""
        for _ in range(2):
            try:
                last = gateway.complete(req, self.backend, sleep=self.sleep)
            except GatewayError as exc:
                raise BackendError(f"classifier backend failed: {exc}") from exc
            label = last.strip().strip(".\"'").lower()
            if label in _LABELS:
                return _LABELS[label]
        raise BackendError(f"backend produced no valid intent label: {last!r}")


def classify(utterance: str, backend: ClassifierBackend) -> Intent:
    """Classify one utterance; raises EmptyUtterance on blank input."""
    if not utterance.strip():
        raise EmptyUtterance("utterance is empty after trimming")
    return backend.classify(utterance)


# -- navigation goals ----------------------------------------------------------


class GoalKind(str, Enum):
    SPECIFIC_EXHIBIT = "specific_exhibit"
    NEXT = "next"
    SHOW_AROUND = "show_around"
    DIRECTIONAL = "directional"


@dataclass(frozen=True)
class NavGoal:
    kind: GoalKind
    exhibit_id: int | None = None
    command: Command | None = None


@dataclass
class SuggestionState:
    """Exhibits seen so far plus the most recent suggestion."""

    visited: list[int] = field(default_factory=list)
    last_suggested: int | None = None

    def mark_visited(self, exhibit_id: int) -> None:
        if exhibit_id not in self.visited:
            self.visited.append(exhibit_id)


def suggest_next(state: SuggestionState, tour_order: tuple[int, ...]) -> int | None:
    """First tour stop not yet visited; None once the tour is complete."""
    for exhibit_id in tour_order:
        if exhibit_id not in state.visited:
            state.last_suggested = exhibit_id
            return exhibit_id
    return None


def is_affirmative(utterance: str) -> bool:
    tokens = normalize(utterance)
    return any(contains_phrase(tokens, p) for p in AFFIRMATIVE_PHRASES)


def is_negative(utterance: str) -> bool:
    tokens = normalize(utterance)
    return any(contains_phrase(tokens, p) for p in NEGATIVE_PHRASES)


def _validated_exhibit(world: AnnotatedMap, exhibit_id: int) -> NavGoal:
    if world.exhibit(exhibit_id) is None:
        raise UnknownExhibit(f"exhibit {exhibit_id} is not on the map")
    return NavGoal(GoalKind.SPECIFIC_EXHIBIT, exhibit_id=exhibit_id)


def extract_goal(
    utterance: str,
    world: AnnotatedMap,
    state: SuggestionState | None = None,
    lexicon: RuleLexicon | None = None,
) -> NavGoal:
    """Turn a navigational utterance into a goal.

    Accepting a standing suggestion ("yes, take me there") resolves to the
    suggested exhibit. Explicit exhibit numbers win over name matches, which
    win over "next" phrasing and open-ended "show me around".
    """
    tokens = normalize(utterance)
    if not tokens:
        raise EmptyUtterance("utterance is empty after trimming")
    lexicon = lexicon or RuleLexicon.from_map(world)

    cmd = directional_command(tokens)
    if cmd is not None and not lexicon.has_place_reference(tokens):
        return NavGoal(GoalKind.DIRECTIONAL, command=cmd)

    number = exhibit_number(tokens)
    if number is not None:
        return _validated_exhibit(world, number)

    candidates = lexicon.name_candidates(tokens)
    if len(candidates) == 1:
        return _validated_exhibit(world, candidates[0])
    if len(candidates) > 1:
        raise AmbiguousGoal(utterance.strip(), candidates)

    if "next" in tokens or contains_phrase(tokens, ("move", "on")):
        return NavGoal(GoalKind.NEXT)
    if "around" in tokens:
        return NavGoal(GoalKind.SHOW_AROUND)

    bare = any_number(tokens)
    if bare is not None:
        return _validated_exhibit(world, bare)

    if state is not None and state.last_suggested is not None and is_affirmative(utterance):
        return _validated_exhibit(world, state.last_suggested)

    return NavGoal(GoalKind.SHOW_AROUND)


@dataclass
class LlmGoalExtractor:
    """Structured extraction of the goal exhibit number via the gateway."""

    backend: gateway.Backend
    deadline: float = gateway.DEFAULT_DEADLINE

    def extract(self, utterance: str, world: AnnotatedMap) -> NavGoal:
        req = gateway.GatewayRequest(
            system_text=(
                "Extract the exhibit number the visitor wants to visit. "
                'Reply with JSON like {"exhibit_number": 13}.'
            ),
            user_text=utterance,
            temperature=0.0,
            deadline=self.deadline,
        )
        fields = gateway.extract_structured(req, {"exhibit_number": int}, self.backend)
        return _validated_exhibit(world, fields["exhibit_number"])


# -- prompt assembly -----------------------------------------------------------

DEFAULT_PREAMBLE = (
    "You are the museum's tour-guide robot, having a friendly dialogue with a "
    "remote visitor. Answer the visitor's question using only the exhibit "
    "information below, and ask the visitor about their own experience with "
    "geology."
)

SECTION_ORDER = (
    "preamble",
    "current_exhibit_intro",
    "sample_dialogue",
    "area_text",
    "nearby_intros",
    "visit_history",
    "user_utterance",
)

_PLACEHOLDER = re.compile(r"\{(\w+)\}")


@dataclass(frozen=True)
class PromptTemplate:
    """Blank-line-separated blocks; a block is dropped when any of its
    placeholders is empty."""

    blocks: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "PromptTemplate":
        blocks = tuple(b.strip("\n") for b in re.split(r"\n\s*\n", text.strip()) if b.strip())
        return cls(blocks)

    @classmethod
    def from_file(cls, path) -> "PromptTemplate":
        from pathlib import Path

        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def render(self, values: dict[str, str]) -> str:
        rendered = []
        for block in self.blocks:
            names = _PLACEHOLDER.findall(block)
            if any(not values.get(name, "") for name in names):
                continue
            rendered.append(
                _PLACEHOLDER.sub(lambda m: values[m.group(1)], block)
            )
        return "\n\n".join(rendered)


def default_template() -> PromptTemplate:
    from importlib.resources import files

    return PromptTemplate.from_text(
        files("tourbot.data").joinpath("prompt_template.txt").read_text("utf-8")
    )


@dataclass(frozen=True)
class PromptBundle:
    preamble: str
    current_exhibit_intro: str
    sample_dialogue: str
    area_text: str
    nearby_intros: str
    visit_history: str
    user_utterance: str

    def as_values(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in SECTION_ORDER}

    def render(self, template: PromptTemplate) -> str:
        return template.render(self.as_values())


def _format_dialogue(exhibit: Exhibit) -> str:
    speakers = {"guide": "Tour guide", "visitor": "Visitor"}
    return "\n".join(
        f"{speakers[turn.speaker]}: {turn.text}" for turn in exhibit.sample_dialogue
    )


def _exhibit_at(world: AnnotatedMap, pose: Pose) -> Exhibit | None:
    cell = world.grid.cell_of(pose.x, pose.y)
    for ex in sorted(world.exhibits, key=lambda e: e.id):
        if world.grid.cell_of(ex.viewing_pose.x, ex.viewing_pose.y) == cell:
            return ex
    return None


def build_prompt(
    intent: Intent,
    utterance: str,
    world: AnnotatedMap,
    robot_pose: Pose,
    visited: tuple[int, ...] = (),
    goal_exhibit_id: int | None = None,
    preamble: str = DEFAULT_PREAMBLE,
) -> PromptBundle:
    """Assemble the grounding bundle for a conversational intent.

    The focus exhibit is the one the robot is parked at, falling back to the
    navigation goal while in transit; with neither, the exhibit sections stay
    empty and only the area context remains.
    """
    if intent not in CONVERSATIONAL_INTENTS:
        raise ValueError(f"build_prompt expects a conversational intent, got {intent}")
    current = _exhibit_at(world, robot_pose)
    if current is None and goal_exhibit_id is not None:
        current = world.exhibit(goal_exhibit_id)
    area = area_of(world, robot_pose)
    nearby = [
        ex for ex in nearby_exhibits(world, robot_pose)
        if current is None or ex.id != current.id
    ]
    nearby_text = "\n".join(
        f"Exhibit {ex.id} ({ex.name}): {ex.intro}" for ex in nearby
    )
    history = ", ".join(
        f"exhibit {i} ({world.exhibit(i).name})" for i in visited if world.exhibit(i)
    )
    return PromptBundle(
        preamble=preamble,
        current_exhibit_intro=current.intro if current else "",
        sample_dialogue=_format_dialogue(current) if current else "",
        area_text=area.name,
        nearby_intros=nearby_text,
        visit_history=history,
        user_utterance=utterance,
    )


# -- proactive narration ---------------------------------------------------------


def proactive_due(
    now: float,
    last_activity: float,
    threshold: float,
    robot_speaking: bool = False,
    transit_narrating: bool = False,
) -> bool:
    """Has the silence window elapsed with the robot free to speak?

    The comparison is written as ``now >= last_activity + threshold`` so a
    caller that jumped the clock to exactly that instant sees it fire.
    """
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    return (
        now >= last_activity + threshold
        and not robot_speaking
        and not transit_narrating
    )


def nearest_unvisited(
    world: AnnotatedMap, pose: Pose, visited: tuple[int, ...]
) -> Exhibit | None:
    remaining = [ex for ex in world.exhibits if ex.id not in visited]
    if not remaining:
        return None
    return min(remaining, key=lambda ex: (pose.distance_to(ex.viewing_pose), ex.id))


# -- intent handlers --------------------------------------------------------------

FALLBACK_SPEECH = "I didn't catch that. Could you say it again?"
TOUR_COMPLETE_SPEECH = (
    "We have now seen every stop on the tour. Feel free to keep exploring, or "
    "ask me about anything that caught your eye."
)


@dataclass(frozen=True)
class Action:
    """What the robot should do in response to one utterance."""

    speech: str | None = None
    goal: NavGoal | None = None
    error: str | None = None


@dataclass
class HandlerContext:
    world: AnnotatedMap
    robot_pose: Pose
    backend: gateway.Backend
    suggestion: SuggestionState
    template: PromptTemplate
    goal_exhibit_id: int | None = None
    lexicon: RuleLexicon | None = None
    sleep: Callable[[float], None] = __import__("time").sleep


def _goto_speech(world: AnnotatedMap, exhibit_id: int, suggested: bool) -> str:
    name = world.exhibit(exhibit_id).name
    if suggested:
        return f"Let's head over to exhibit {exhibit_id}, {name}."
    return f"Taking you to exhibit {exhibit_id}, {name}."


def handle(intent: Intent, utterance: str, ctx: HandlerContext) -> Action:
    """Route one classified utterance to its handler.

    Conversational intents speak through the gateway; high-level control
    navigates with a spoken confirmation; low-level control maps straight to
    a directional command without any language-model call.
    """
    if intent is Intent.LOW_LEVEL:
        tokens = normalize(utterance)
        cmd = directional_command(tokens)
        if cmd is None:
            return Action(speech=FALLBACK_SPEECH, error="no directional command found")
        return Action(goal=NavGoal(GoalKind.DIRECTIONAL, command=cmd))

    if intent is Intent.HIGH_LEVEL:
        try:
            goal = extract_goal(utterance, ctx.world, ctx.suggestion, ctx.lexicon)
        except AmbiguousGoal as exc:
            names = ", ".join(
                f"{i} ({ctx.world.exhibit(i).name})" for i in exc.candidates
            )
            return Action(
                speech=f"Which exhibit do you mean: {names}?", error=str(exc)
            )
        except UnknownExhibit as exc:
            return Action(
                speech="I don't see that exhibit on my map.", error=str(exc)
            )
        if goal.kind is GoalKind.DIRECTIONAL:
            return Action(goal=goal)
        if goal.kind is GoalKind.SPECIFIC_EXHIBIT:
            return Action(
                speech=_goto_speech(ctx.world, goal.exhibit_id, suggested=False),
                goal=goal,
            )
        # "next" and open-ended guidance both follow the tour order.
        nxt = suggest_next(ctx.suggestion, ctx.world.tour_order)
        if nxt is None:
            return Action(speech=TOUR_COMPLETE_SPEECH)
        return Action(
            speech=_goto_speech(ctx.world, nxt, suggested=True),
            goal=NavGoal(GoalKind.SPECIFIC_EXHIBIT, exhibit_id=nxt),
        )

    bundle = build_prompt(
        intent,
        utterance,
        ctx.world,
        ctx.robot_pose,
        visited=tuple(ctx.suggestion.visited),
        goal_exhibit_id=ctx.goal_exhibit_id,
    )
    req = gateway.GatewayRequest(
        system_text=bundle.render(ctx.template),
        user_text=utterance,
        temperature=0.2,
    )
    try:
        return Action(speech=gateway.complete(req, ctx.backend, sleep=ctx.sleep))
    except GatewayError as exc:
        return Action(speech=FALLBACK_SPEECH, error=f"gateway failure: {exc}")


def proactive_chat(ctx: HandlerContext, visited: tuple[int, ...]) -> str:
    """Small talk for a silence window, seeded with the nearest unvisited
    exhibit so the chat stays anchored to the room."""
    seed = nearest_unvisited(ctx.world, ctx.robot_pose, visited)
    seed_text = seed.intro if seed else "the exhibits we have seen today"
    req = gateway.GatewayRequest(
        system_text=(
            "You are the museum's tour-guide robot. The visitor has been "
            "quiet for a while, so start a short, friendly chat. Ground it "
            f"in this exhibit information: {seed_text}"
        ),
        user_text="(the visitor has been quiet; say something engaging)",
        temperature=0.2,
    )
    try:
        return gateway.complete(req, ctx.backend, sleep=ctx.sleep)
    except GatewayError:
        return f"While we have a quiet moment: {seed_text}"
