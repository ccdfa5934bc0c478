// Console view model. Everything here is derived from the server snapshot
// plus the event stream; the client never invents authoritative state. The
// reducers are pure so they can be unit-tested without a DOM.

import {
  EventRecord,
  MapDoc,
  Pose,
  PoseMessage,
  Snapshot,
} from "./types.js";
import { groupForIntent, TimelineRow } from "./timeline.js";

export type Connection = "connecting" | "live" | "reconnecting" | "closed";

export interface ChatRow {
  speaker: "visitor" | "guide" | "system";
  text: string;
  t: number | null;
  pending: boolean;
}

export interface SuggestionBanner {
  exhibitId: number;
  name: string;
}

export interface ConsoleState {
  connection: Connection;
  sessionId: string | null;
  map: MapDoc | null;
  pose: Pose | null;
  mode: string;
  goalExhibitId: number | null;
  plan: Array<[number, number]>;
  speaking: boolean;
  chat: ChatRow[];
  suggestion: SuggestionBanner | null;
  visited: number[];
  timeline: TimelineRow[];
  nextEventIndex: number;
}

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    sessionId: null,
    map: null,
    pose: null,
    mode: "idle",
    goalExhibitId: null,
    plan: [],
    speaking: false,
    chat: [],
    suggestion: null,
    visited: [],
    timeline: [],
    nextEventIndex: 0,
  };
}

export function applySnapshot(state: ConsoleState, snap: Snapshot): void {
  state.sessionId = snap.session_id;
  state.pose = snap.pose;
  state.mode = snap.mode;
  state.goalExhibitId = snap.goal_exhibit_id;
  state.plan = snap.plan;
  state.speaking = snap.speaking;
  state.visited = [...snap.visited];
  if (snap.closed) {
    state.connection = "closed";
  }
}

export function applyPose(state: ConsoleState, msg: PoseMessage): void {
  state.pose = msg.pose;
  state.mode = msg.mode;
  state.goalExhibitId = msg.goal_exhibit_id;
  state.plan = msg.plan;
  state.speaking = msg.speaking;
}

/** Optimistic chat row shown until the echoed transcript event arrives. */
export function addPendingUtterance(state: ConsoleState, text: string): void {
  state.chat.push({ speaker: "visitor", text, t: null, pending: true });
}

function resolvePending(state: ConsoleState, text: string, t: number): boolean {
  const row = state.chat.find((r) => r.pending && r.text === text);
  if (row) {
    row.pending = false;
    row.t = t;
    return true;
  }
  return false;
}

/**
 * Fold one transcript event into the view model. Events arrive indexed; a
 * reconnect may replay older ones, which are dropped so chat rows never
 * duplicate.
 */
export function applyTranscriptEvent(
  state: ConsoleState,
  index: number,
  event: EventRecord,
): void {
  if (index < state.nextEventIndex) {
    return; // replayed after reconnect
  }
  state.nextEventIndex = index + 1;
  const payload = event.payload;
  switch (event.kind) {
    case "user_utterance": {
      const text = String(payload.text ?? "");
      if (!resolvePending(state, text, event.t)) {
        state.chat.push({ speaker: "visitor", text, t: event.t, pending: false });
      }
      state.timeline.push({
        t: event.t,
        group: groupForIntent(event.intent),
        politeness: event.politeness ?? "direct",
      });
      break;
    }
    case "robot_speech":
      state.chat.push({
        speaker: "guide",
        text: String(payload.text ?? ""),
        t: event.t,
        pending: false,
      });
      break;
    case "suggestion":
      state.suggestion = {
        exhibitId: Number(payload.exhibit_id),
        name: String(payload.name ?? ""),
      };
      break;
    case "nav_command":
      // Any navigation resolves the standing suggestion.
      state.suggestion = null;
      break;
    case "arrived": {
      const id = Number(payload.exhibit_id);
      if (!state.visited.includes(id)) {
        state.visited.push(id);
      }
      break;
    }
    case "error":
      state.chat.push({
        speaker: "system",
        text: String(payload.message ?? "error"),
        t: event.t,
        pending: false,
      });
      break;
  }
}

export function clearSuggestion(state: ConsoleState): void {
  state.suggestion = null;
}
