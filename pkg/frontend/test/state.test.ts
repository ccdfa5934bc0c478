import { describe, expect, it } from "vitest";

import {
  addPendingUtterance,
  applySnapshot,
  applyTranscriptEvent,
  applyPose,
  initialState,
} from "../src/state.js";
import { EventRecord, Snapshot } from "../src/types.js";

function snapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    session_id: "s-test",
    t: 0,
    pose: { x: 0.75, y: 0.75, theta: 0 },
    mode: "idle",
    goal_exhibit_id: null,
    speaking: false,
    visited: [],
    pending_suggestion: null,
    event_count: 0,
    plan: [],
    closed: false,
    ...overrides,
  };
}

function event(kind: EventRecord["kind"], t: number, payload: Record<string, unknown>,
               extra: Partial<EventRecord> = {}): EventRecord {
  return { t, kind, payload, ...extra };
}

describe("snapshot hydration", () => {
  it("places the robot marker at the start pose", () => {
    const state = initialState();
    applySnapshot(state, snapshot());
    expect(state.pose).toEqual({ x: 0.75, y: 0.75, theta: 0 });
    expect(state.visited).toEqual([]);
  });

  it("badges visited exhibits on a mid-tour connect", () => {
    const state = initialState();
    applySnapshot(state, snapshot({ visited: [1, 3], mode: "autonomous",
                                    goal_exhibit_id: 4 }));
    expect(state.visited).toEqual([1, 3]);
    expect(state.goalExhibitId).toBe(4);
  });
});

describe("transcript reduction", () => {
  it("adds visitor and guide chat rows in order", () => {
    const state = initialState();
    applyTranscriptEvent(state, 0, event("user_utterance", 1, { text: "hi" },
                                         { intent: "free_chat", politeness: "direct" }));
    applyTranscriptEvent(state, 1, event("robot_speech", 1, { text: "hello!" }));
    expect(state.chat.map((r) => r.speaker)).toEqual(["visitor", "guide"]);
  });

  it("resolves a pending optimistic row instead of duplicating it", () => {
    const state = initialState();
    addPendingUtterance(state, "go to exhibit 4");
    applyTranscriptEvent(state, 0, event("user_utterance", 2,
      { text: "go to exhibit 4" },
      { intent: "high_level_control", politeness: "direct" }));
    expect(state.chat).toHaveLength(1);
    expect(state.chat[0].pending).toBe(false);
    expect(state.chat[0].t).toBe(2);
  });

  it("drops replayed events after a reconnect", () => {
    const state = initialState();
    const utterance = event("user_utterance", 1, { text: "hi" },
                            { intent: "free_chat" });
    applyTranscriptEvent(state, 0, utterance);
    applyTranscriptEvent(state, 0, utterance); // replay
    expect(state.chat).toHaveLength(1);
    expect(state.nextEventIndex).toBe(1);
  });

  it("sets and clears the suggestion banner", () => {
    const state = initialState();
    applyTranscriptEvent(state, 0, event("suggestion", 45,
      { exhibit_id: 1, name: "Red Granite" }));
    expect(state.suggestion).toEqual({ exhibitId: 1, name: "Red Granite" });
    applyTranscriptEvent(state, 1, event("nav_command", 50,
      { action: "goto", exhibit_id: 1 }));
    expect(state.suggestion).toBeNull();
  });

  it("badges exhibits exactly once on arrival", () => {
    const state = initialState();
    applyTranscriptEvent(state, 0, event("arrived", 9, { exhibit_id: 4 }));
    applyTranscriptEvent(state, 1, event("arrived", 30, { exhibit_id: 4 }));
    expect(state.visited).toEqual([4]);
  });

  it("collects timeline rows only for user utterances", () => {
    const state = initialState();
    applyTranscriptEvent(state, 0, event("user_utterance", 1, { text: "turn left" },
      { intent: "low_level_control", politeness: "direct" }));
    applyTranscriptEvent(state, 1, event("robot_speech", 2, { text: "ok" }));
    applyTranscriptEvent(state, 2, event("user_utterance", 3,
      { text: "could you tell me about galena" },
      { intent: "inquiry_about_museum", politeness: "polite" }));
    expect(state.timeline).toEqual([
      { t: 1, group: "navigational", politeness: "direct" },
      { t: 3, group: "conversational", politeness: "polite" },
    ]);
  });

  it("shows error events as system chat rows", () => {
    const state = initialState();
    applyTranscriptEvent(state, 0, event("error", 1, { message: "gateway down" }));
    expect(state.chat[0].speaker).toBe("system");
  });
});

describe("pose stream", () => {
  it("moves the marker and draws the plan polyline", () => {
    const state = initialState();
    applyPose(state, {
      t: 3,
      pose: { x: 2.0, y: 1.5, theta: 0.5 },
      mode: "autonomous",
      goal_exhibit_id: 4,
      plan: [[2.25, 1.75], [2.75, 1.75]],
      speaking: false,
    });
    expect(state.pose!.x).toBe(2.0);
    expect(state.plan).toHaveLength(2);
    expect(state.mode).toBe("autonomous");
  });
});
