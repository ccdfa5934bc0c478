"""Study-style coding and statistics over session logs: utterance categories,
politeness tags, suggestion accept/reject outcomes, timeline export, and the
paired t-test used for the within-subject comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import dialogue
from .errors import DegenerateSample, LengthMismatch, TourbotError
from .events import Event, EventKind
from .worldmap import AnnotatedMap


class Category(str, Enum):
    MUSEUM_INQUIRY = "museum_inquiry"
    ROBOT_CONTROL_LOW = "robot_control_low"
    ROBOT_CONTROL_HIGH = "robot_control_high"
    OTHER = "other"


class Politeness(str, Enum):
    POLITE = "polite"
    DIRECT = "direct"


# Positive/negative politeness softeners; anything else counts as direct
# (bald on-record).
POLITENESS_MARKERS: tuple[tuple[str, ...], ...] = tuple(
    tuple(m.split())
    for m in (
        "could you", "can you", "would you", "will you", "please",
        "may i", "shall we", "would it be possible",
    )
)


def code_politeness(text: str) -> Politeness:
    tokens = dialogue.normalize(text)
    for marker in POLITENESS_MARKERS:
        if dialogue.contains_phrase(tokens, marker):
            return Politeness.POLITE
    return Politeness.DIRECT


_CATEGORY_BY_INTENT = {
    dialogue.Intent.LOW_LEVEL: Category.ROBOT_CONTROL_LOW,
    dialogue.Intent.HIGH_LEVEL: Category.ROBOT_CONTROL_HIGH,
    dialogue.Intent.INQUIRY: Category.MUSEUM_INQUIRY,
    dialogue.Intent.COMMENT: Category.OTHER,
    dialogue.Intent.FREE_CHAT: Category.OTHER,
}

_GROUP_BY_CATEGORY = {
    Category.ROBOT_CONTROL_LOW: "navigational",
    Category.ROBOT_CONTROL_HIGH: "navigational",
    Category.MUSEUM_INQUIRY: "conversational",
    Category.OTHER: "other",
}


def code_category(utterance: str, classified_intent: dialogue.Intent) -> Category:
    del utterance  # category is a function of the intent alone
    return _CATEGORY_BY_INTENT[classified_intent]


@dataclass(frozen=True)
class CodedUtterance:
    t: float
    text: str
    category: Category
    politeness: Politeness
    suggestion_response: str | None = None  # "accept" | "reject"


@dataclass(frozen=True)
class SuggestionOutcome:
    t: float
    exhibit_id: int
    response: str  # "accept" | "reject" | "ignored"
    decided_by_t: float | None = None


def _visited_before(events: Sequence[Event], t: float) -> list[int]:
    return [
        int(e.payload["exhibit_id"])
        for e in events
        if e.kind is EventKind.ARRIVED and e.t <= t
    ]


def _response_to(
    utterance: Event,
    suggested: int,
    world: AnnotatedMap | None,
    visited: list[int],
) -> str | None:
    """Classify one utterance as a response to a standing suggestion."""
    text = utterance.payload.get("text", "")
    if dialogue.is_negative(text):
        return "reject"
    target: int | None = None
    if world is not None:
        classifier = dialogue.RuleClassifier.for_map(world)
        try:
            if classifier.classify(text) is dialogue.Intent.HIGH_LEVEL:
                goal = dialogue.extract_goal(text, world)
                if goal.kind is dialogue.GoalKind.SPECIFIC_EXHIBIT:
                    target = goal.exhibit_id
                elif goal.kind in (dialogue.GoalKind.NEXT, dialogue.GoalKind.SHOW_AROUND):
                    target = next(
                        (i for i in world.tour_order if i not in visited), None
                    )
        except TourbotError:
            target = None
    else:
        tokens = dialogue.normalize(text)
        target = dialogue.exhibit_number(tokens)
    if target is not None:
        return "accept" if target == suggested else "reject"
    if dialogue.is_affirmative(text):
        return "accept"
    return None


def code_suggestion_responses(
    events: Sequence[Event], world: AnnotatedMap | None = None
) -> list[SuggestionOutcome]:
    """Outcome of each suggestion, decided by the first user utterance before
    the next suggestion; silence or an unrelated remark counts as ignored."""
    events = sorted(events, key=lambda e: e.t)
    outcomes: list[SuggestionOutcome] = []
    suggestions = [e for e in events if e.kind is EventKind.SUGGESTION]
    for idx, sug in enumerate(suggestions):
        window_end = (
            suggestions[idx + 1].t if idx + 1 < len(suggestions) else math.inf
        )
        first = next(
            (
                e
                for e in events
                if e.kind is EventKind.USER_UTTERANCE and sug.t < e.t <= window_end
            ),
            None,
        )
        suggested = int(sug.payload["exhibit_id"])
        response = "ignored"
        decided_by = None
        if first is not None:
            verdict = _response_to(
                first, suggested, world, _visited_before(events, first.t)
            )
            if verdict is not None:
                response = verdict
                decided_by = first.t
        outcomes.append(SuggestionOutcome(sug.t, suggested, response, decided_by))
    return outcomes


def code_log(
    events: Sequence[Event], world: AnnotatedMap | None = None
) -> list[CodedUtterance]:
    """Code every user utterance in a log; intents recorded in the log are
    trusted, anything untagged goes through the rule classifier."""
    classifier = dialogue.RuleClassifier.for_map(world)
    outcomes = {
        o.decided_by_t: o.response
        for o in code_suggestion_responses(events, world)
        if o.decided_by_t is not None
    }
    coded: list[CodedUtterance] = []
    for event in sorted(events, key=lambda e: e.t):
        if event.kind is not EventKind.USER_UTTERANCE:
            continue
        text = event.payload.get("text", "")
        if event.intent is not None:
            intent = dialogue.Intent(event.intent)
        else:
            intent = classifier.classify(text)
        coded.append(
            CodedUtterance(
                t=event.t,
                text=text,
                category=code_category(text, intent),
                politeness=code_politeness(text),
                suggestion_response=outcomes.get(event.t),
            )
        )
    return coded


@dataclass(frozen=True)
class SessionStats:
    n_accept: int
    n_reject: int
    n_inquiry: int
    n_control: int
    n_low: int
    n_high: int

    def __post_init__(self):
        if self.n_control != self.n_low + self.n_high:
            raise ValueError("control total must equal low + high")


def session_stats(
    events: Sequence[Event], world: AnnotatedMap | None = None
) -> SessionStats:
    coded = code_log(events, world)
    outcomes = code_suggestion_responses(events, world)
    n_low = sum(1 for c in coded if c.category is Category.ROBOT_CONTROL_LOW)
    n_high = sum(1 for c in coded if c.category is Category.ROBOT_CONTROL_HIGH)
    return SessionStats(
        n_accept=sum(1 for o in outcomes if o.response == "accept"),
        n_reject=sum(1 for o in outcomes if o.response == "reject"),
        n_inquiry=sum(1 for c in coded if c.category is Category.MUSEUM_INQUIRY),
        n_control=n_low + n_high,
        n_low=n_low,
        n_high=n_high,
    )


def export_timeline(coded: Sequence[CodedUtterance]) -> dict:
    """Timeline rows for the console strip: time, intent group, politeness."""
    rows = [
        {
            "t": c.t,
            "category_group": _GROUP_BY_CATEGORY[c.category],
            "politeness": c.politeness.value,
        }
        for c in sorted(coded, key=lambda c: c.t)
    ]
    return {"rows": rows}


# -- paired t-test -------------------------------------------------------------


@dataclass(frozen=True)
class PairedTTest:
    n: int
    mean_diff: float
    sd_diff: float
    t_stat: float
    df: int
    p_two_sided: float


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz method)."""
    max_iter = 300
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    return h


def _betai(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t_stat: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    x = df / (df + t_stat * t_stat)
    return _betai(df / 2.0, 0.5, x)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> PairedTTest:
    """Within-subject t-test on pairwise differences a - b.

    Uses the sample standard deviation (n - 1 denominator); the two-sided p
    comes from the Student's t distribution with df = n - 1.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"sample sizes differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise LengthMismatch("need at least 2 pairs")
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        raise DegenerateSample("paired differences have zero variance")
    t_stat = mean / (sd / math.sqrt(n))
    df = n - 1
    return PairedTTest(
        n=n,
        mean_diff=mean,
        sd_diff=sd,
        t_stat=t_stat,
        df=df,
        p_two_sided=student_t_two_sided_p(t_stat, df),
    )
