#!/usr/bin/env python3
"""Simulate a cohort of scripted visitors and run the within-subject
comparisons over their logs: suggestion accepts vs rejects, museum inquiries
vs control commands, and high- vs low-level control.

Each virtual participant gets a random interaction style (how chatty, how
polite, how agreeable) and tours on the virtual clock, so a 20-person cohort
takes a fraction of a second. Deterministic for a fixed --seed.

Usage: python scripts/run_cohort_stats.py [--n 20] [--seed 7] [--out stats.json]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from tourbot.analysis import paired_t_test, session_stats
from tourbot.errors import DegenerateSample
from tourbot.gateway import ScriptedBackend
from tourbot.session import Session
from tourbot.worldmap import load_map

DATA = Path(__file__).resolve().parents[1] / "src" / "tourbot" / "data"

INQUIRIES = [
    "what is galena",
    "tell me about the meteorites",
    "how old is the red granite",
    "what kind of rock is this",
    "could you explain this mineral",
    "where do trilobites come from",
]
COMMENTS = [
    "this mineral is beautiful",
    "that fossil looks huge",
    "i love this museum",
]
LOW_LEVEL = ["turn left", "move forward", "turn right", "could you back up", "stop"]
HIGH_LEVEL = [
    "go to the next exhibit",
    "could you show me exhibit 4",
    "take me to the fossils",
    "show me around",
]
ACCEPTS = ["yes", "sure", "sounds good"]
REJECTS = ["no thanks", "not now", "later"]


def run_participant(world, backend, rng: random.Random, minutes: float):
    session = Session(world, backend, session_id=f"p{rng.random():.0f}")
    chattiness = rng.uniform(0.3, 0.8)       # P(say something each beat)
    agreeableness = rng.uniform(0.2, 0.95)   # P(accept a suggestion)
    curiosity = rng.uniform(0.2, 0.8)        # P(inquiry over control)
    end = minutes * 60.0
    while session.clock < end:
        session.advance(rng.uniform(10.0, 40.0))
        if session.pending_suggestion is not None:
            pool = ACCEPTS if rng.random() < agreeableness else REJECTS
            session.submit_utterance(rng.choice(pool))
            continue
        if rng.random() > chattiness:
            continue
        roll = rng.random()
        if roll < curiosity * 0.7:
            session.submit_utterance(rng.choice(INQUIRIES))
        elif roll < curiosity:
            session.submit_utterance(rng.choice(COMMENTS))
        elif roll < curiosity + (1 - curiosity) / 2:
            session.submit_utterance(rng.choice(LOW_LEVEL))
        else:
            session.submit_utterance(rng.choice(HIGH_LEVEL))
    return session_stats(session.transcript, world)


def report(label: str, a: list[float], b: list[float]) -> dict:
    mean_a = sum(a) / len(a)
    mean_b = sum(b) / len(b)
    line = f"{label}: mean {mean_a:.2f} vs {mean_b:.2f}"
    try:
        t = paired_t_test(a, b)
        print(f"{line}  ->  t({t.df}) = {t.t_stat:.2f}, p = {t.p_two_sided:.4f}")
        return {
            "comparison": label, "mean_a": mean_a, "mean_b": mean_b,
            "t": t.t_stat, "df": t.df, "p": t.p_two_sided,
        }
    except DegenerateSample:
        print(f"{line}  ->  degenerate (zero variance in differences)")
        return {"comparison": label, "mean_a": mean_a, "mean_b": mean_b}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20, help="cohort size")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--minutes", type=float, default=20.0,
                        help="virtual tour length per participant")
    parser.add_argument("--out", help="write the summary JSON here")
    args = parser.parse_args()

    world = load_map((DATA / "museum11.map").read_bytes())
    backend = ScriptedBackend.from_file(DATA / "scripted_rules.json")
    rng = random.Random(args.seed)

    cohort = [
        run_participant(world, backend, random.Random(rng.random()), args.minutes)
        for _ in range(args.n)
    ]
    print(f"cohort of {args.n} simulated visitors, {args.minutes:.0f} virtual "
          "minutes each\n")
    results = [
        report(
            "acceptances vs rejections",
            [float(s.n_accept) for s in cohort],
            [float(s.n_reject) for s in cohort],
        ),
        report(
            "museum inquiries vs control commands",
            [float(s.n_inquiry) for s in cohort],
            [float(s.n_control) for s in cohort],
        ),
        report(
            "high-level vs low-level control",
            [float(s.n_high) for s in cohort],
            [float(s.n_low) for s in cohort],
        ),
    ]
    if args.out:
        Path(args.out).write_text(json.dumps(results, indent=2) + "\n")
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
