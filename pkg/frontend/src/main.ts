// Console entry point: hydrate from the snapshot, follow the stream, and
// wire every control to its endpoint.

import { ApiClient, Command } from "./api.js";
import { drawConsole, viewportFor, Viewport } from "./render.js";
import { followStream } from "./sse.js";
import {
  addPendingUtterance,
  applyPose,
  applySnapshot,
  applyTranscriptEvent,
  ConsoleState,
  initialState,
} from "./state.js";
import { rowClass } from "./timeline.js";
import { EventRecord, MapDoc, PoseMessage, Snapshot } from "./types.js";

const baseUrl = window.location.origin;
const api = new ApiClient(baseUrl);
const state: ConsoleState = initialState();

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const chatList = document.getElementById("chat")!;
const chatInput = document.getElementById("chat-input") as HTMLInputElement;
const chatForm = document.getElementById("chat-form") as HTMLFormElement;
const statusDot = document.getElementById("status")!;
const banner = document.getElementById("suggestion")!;
const bannerText = document.getElementById("suggestion-text")!;
const timelineStrip = document.getElementById("timeline")!;

let view: Viewport | null = null;

function render(): void {
  statusDot.dataset.state = state.connection;
  statusDot.textContent = state.connection;

  if (state.map && view) {
    drawConsole(ctx, state, view);
  }

  chatList.replaceChildren(
    ...state.chat.map((row) => {
      const el = document.createElement("div");
      el.className = `chat-row ${row.speaker}${row.pending ? " pending" : ""}`;
      el.textContent = row.text;
      return el;
    }),
  );
  chatList.scrollTop = chatList.scrollHeight;

  if (state.suggestion) {
    banner.hidden = false;
    bannerText.textContent =
      `Head to exhibit ${state.suggestion.exhibitId}, ` +
      `${state.suggestion.name}?`;
  } else {
    banner.hidden = true;
  }

  timelineStrip.replaceChildren(
    ...state.timeline.map((row) => {
      const el = document.createElement("span");
      el.className = `tl-seg ${rowClass(row)}`;
      el.title = `${row.group} / ${row.politeness} @ ${row.t.toFixed(1)}s`;
      return el;
    }),
  );
}

async function boot(): Promise<void> {
  const map: MapDoc = await api.getMap();
  state.map = map;
  view = viewportFor(map, canvas.parentElement?.clientWidth ?? 720);
  canvas.width = map.grid.width * view.cellPx;
  canvas.height = view.heightPx;

  const created = await api.createSession();
  const snapshot: Snapshot = await api.getSnapshot(created.session_id);
  applySnapshot(state, snapshot);
  render();

  followStream(baseUrl, created.session_id, {
    since: () => state.nextEventIndex,
    onStatus: (status) => {
      state.connection = status;
      render();
    },
    onMessage: (msg) => {
      if (msg.event === "transcript") {
        const parsed = JSON.parse(msg.data) as {
          index: number;
          event: EventRecord;
        };
        applyTranscriptEvent(state, parsed.index, parsed.event);
      } else if (msg.event === "pose") {
        applyPose(state, JSON.parse(msg.data) as PoseMessage);
      }
      render();
    },
  });

  chatForm.addEventListener("submit", (e) => {
    e.preventDefault();
    const text = chatInput.value.trim();
    if (!text || !state.sessionId) {
      return;
    }
    addPendingUtterance(state, text);
    chatInput.value = "";
    render();
    void api.sendUtterance(state.sessionId, text);
  });

  for (const button of document.querySelectorAll<HTMLButtonElement>("[data-cmd]")) {
    button.addEventListener("click", () => {
      if (state.sessionId) {
        void api.sendCommand(state.sessionId, button.dataset.cmd as Command);
      }
    });
  }

  document.getElementById("accept")!.addEventListener("click", () => {
    if (state.sessionId) {
      void api.respondSuggestion(state.sessionId, "accept");
    }
  });
  document.getElementById("decline")!.addEventListener("click", () => {
    if (state.sessionId) {
      void api.respondSuggestion(state.sessionId, "reject");
    }
  });
}

void boot().catch((err) => {
  statusDot.dataset.state = "closed";
  statusDot.textContent = `failed: ${err}`;
});
