// Wire contract with the tourbot service. Field names mirror the server's
// published schemas (snapshot record, NDJSON log events, SSE messages).

export interface Pose {
  x: number;
  y: number;
  theta: number;
}

export interface GridDoc {
  resolution: number;
  origin: [number, number];
  width: number;
  height: number;
  rows: string[];
}

export interface AreaDoc {
  id: string;
  name: string;
  cells: Array<[number, number]>;
}

export interface ExhibitDoc {
  id: number;
  name: string;
  area_id: string;
  viewing_pose: Pose;
  intro: string;
}

export interface MapDoc {
  grid: GridDoc;
  areas: AreaDoc[];
  exhibits: ExhibitDoc[];
  tour_order: number[];
}

export type EventKind =
  | "user_utterance"
  | "robot_speech"
  | "nav_command"
  | "arrived"
  | "suggestion"
  | "error";

export interface EventRecord {
  t: number;
  kind: EventKind;
  intent?: string;
  politeness?: "polite" | "direct";
  payload: Record<string, unknown>;
}

export interface TranscriptMessage {
  index: number;
  event: EventRecord;
}

export interface PoseMessage {
  t: number;
  pose: Pose;
  mode: string;
  goal_exhibit_id: number | null;
  plan: Array<[number, number]>;
  speaking: boolean;
}

export interface Snapshot {
  session_id: string;
  t: number;
  pose: Pose;
  mode: string;
  goal_exhibit_id: number | null;
  speaking: boolean;
  visited: number[];
  pending_suggestion: number | null;
  event_count: number;
  plan: Array<[number, number]>;
  closed: boolean;
}

export interface CreateSessionResponse {
  session_id: string;
  clock: "wall" | "manual";
  start_pose: Pose;
  map_summary: {
    exhibits: number;
    areas: string[];
    tour_order: number[];
  };
}
