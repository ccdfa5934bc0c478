import { describe, expect, it } from "vitest";

import { followStream, SseParser } from "../src/sse.js";

describe("SSE parsing", () => {
  it("parses complete messages with event, id, and data", () => {
    const parser = new SseParser();
    const messages = parser.push(
      'id: 0\nevent: transcript\ndata: {"index": 0}\n\n' +
      'event: pose\ndata: {"mode": "idle"}\n\n',
    );
    expect(messages).toEqual([
      { event: "transcript", data: '{"index": 0}', id: "0" },
      { event: "pose", data: '{"mode": "idle"}', id: null },
    ]);
  });

  it("handles messages split across chunk boundaries", () => {
    const parser = new SseParser();
    expect(parser.push("event: pose\nda")).toEqual([]);
    const rest = parser.push('ta: {"x": 1}\n\nevent: pose\ndata: {"x": 2}\n\n');
    expect(rest.map((m) => m.data)).toEqual(['{"x": 1}', '{"x": 2}']);
  });

  it("ignores heartbeat blocks without data", () => {
    const parser = new SseParser();
    expect(parser.push(": keepalive\n\n")).toEqual([]);
  });
});

function streamResponse(body: string, ok = true): Response {
  const encoder = new TextEncoder();
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      controller.enqueue(encoder.encode(body));
      controller.close();
    },
  });
  return new Response(stream, { status: ok ? 200 : 500 });
}

describe("stream follower", () => {
  it("resumes from the caller's cursor after a drop", async () => {
    const urls: string[] = [];
    let consumed = 0;
    const first =
      'id: 0\nevent: transcript\ndata: {"index":0,"event":{}}\n\n' +
      'id: 1\nevent: transcript\ndata: {"index":1,"event":{}}\n\n';
    const second =
      'id: 2\nevent: transcript\ndata: {"index":2,"event":{}}\n\n' +
      'event: end\ndata: {"reason": "session closed"}\n\n';

    let call = 0;
    const fetchImpl = (async (url: RequestInfo | URL) => {
      urls.push(String(url));
      call += 1;
      if (call === 1) {
        return streamResponse(first); // ends in a bare EOF -> reconnect
      }
      if (call === 2) {
        throw new Error("network drop"); // reconnect again
      }
      return streamResponse(second);
    }) as typeof fetch;

    const seen: number[] = [];
    const statuses: string[] = [];
    await new Promise<void>((resolve) => {
      followStream(
        "http://svc",
        "s-1",
        {
          since: () => consumed,
          onStatus: (s) => {
            statuses.push(s);
            if (s === "closed") {
              resolve();
            }
          },
          onMessage: (msg) => {
            const parsed = JSON.parse(msg.data) as { index: number };
            seen.push(parsed.index);
            consumed = parsed.index + 1;
          },
        },
        fetchImpl,
        5,
      );
    });

    expect(seen).toEqual([0, 1, 2]);
    expect(urls[0]).toContain("since=0");
    expect(urls[2]).toContain("since=2"); // resumed, no duplicates requested
    expect(statuses.filter((s) => s === "reconnecting").length).toBe(2);
    expect(statuses[statuses.length - 1]).toBe("closed");
  });

  it("stops cleanly on the explicit end marker without reconnecting", async () => {
    let calls = 0;
    const fetchImpl = (async () => {
      calls += 1;
      return streamResponse('event: end\ndata: {"reason": "session closed"}\n\n');
    }) as typeof fetch;

    await new Promise<void>((resolve) => {
      followStream(
        "http://svc",
        "s-1",
        {
          since: () => 0,
          onStatus: (s) => {
            if (s === "closed") {
              resolve();
            }
          },
          onMessage: () => {},
        },
        fetchImpl,
        5,
      );
    });
    expect(calls).toBe(1);
  });
});
