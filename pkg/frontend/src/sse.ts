// Server-sent-events client built on fetch streaming (works in browsers and
// Node alike, no EventSource dependency). Reconnects with the caller's
// resume cursor so no event is duplicated or lost across drops.

export interface SseMessage {
  event: string;
  data: string;
  id: string | null;
}

/** Incremental parser; feed it chunks, get complete messages back. */
export class SseParser {
  private buffer = "";

  push(chunk: string): SseMessage[] {
    this.buffer += chunk;
    const messages: SseMessage[] = [];
    let cut: number;
    while ((cut = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const message = parseBlock(block);
      if (message) {
        messages.push(message);
      }
    }
    return messages;
  }
}

function parseBlock(block: string): SseMessage | null {
  let event = "message";
  let id: string | null = null;
  const data: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith("event: ")) {
      event = line.slice(7);
    } else if (line.startsWith("data: ")) {
      data.push(line.slice(6));
    } else if (line.startsWith("id: ")) {
      id = line.slice(4);
    }
  }
  if (data.length === 0) {
    return null;
  }
  return { event, data: data.join("\n"), id };
}

export interface StreamCallbacks {
  onMessage: (msg: SseMessage) => void;
  onStatus: (status: "live" | "reconnecting" | "closed") => void;
  /** Resume cursor: how many transcript events have been consumed. */
  since: () => number;
}

export interface StreamHandle {
  stop: () => void;
}

/**
 * Follow a session's stream until stopped. The server marks a finished
 * session with an explicit `end` message; anything else that interrupts the
 * stream (error or bare EOF) is treated as a drop and triggers a reconnect
 * with the current resume cursor.
 */
export function followStream(
  baseUrl: string,
  sessionId: string,
  callbacks: StreamCallbacks,
  fetchImpl: typeof fetch = fetch,
  retryDelayMs = 1000,
): StreamHandle {
  let stopped = false;

  async function loop(): Promise<void> {
    while (!stopped) {
      const url =
        `${baseUrl}/sessions/${sessionId}/stream` +
        `?since=${callbacks.since()}&follow=true`;
      try {
        const response = await fetchImpl(url);
        if (!response.ok || !response.body) {
          throw new Error(`stream returned ${response.status}`);
        }
        callbacks.onStatus("live");
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        while (!stopped) {
          const { done, value } = await reader.read();
          if (done) {
            break;
          }
          for (const msg of parser.push(decoder.decode(value, { stream: true }))) {
            if (msg.event === "end") {
              callbacks.onStatus("closed");
              return;
            }
            callbacks.onMessage(msg);
          }
        }
        if (stopped) {
          return;
        }
      } catch {
        if (stopped) {
          return;
        }
      }
      callbacks.onStatus("reconnecting");
      await new Promise((resolve) => setTimeout(resolve, retryDelayMs));
    }
  }

  void loop();
  return {
    stop: () => {
      stopped = true;
    },
  };
}
