import { describe, expect, it } from "vitest";

import { groupForIntent, rowClass } from "../src/timeline.js";

describe("intent grouping", () => {
  it("maps control intents to navigational", () => {
    expect(groupForIntent("low_level_control")).toBe("navigational");
    expect(groupForIntent("high_level_control")).toBe("navigational");
  });

  it("maps museum inquiry to conversational", () => {
    expect(groupForIntent("inquiry_about_museum")).toBe("conversational");
  });

  it("maps comments, free chat, and unknowns to other", () => {
    expect(groupForIntent("comment")).toBe("other");
    expect(groupForIntent("free_chat")).toBe("other");
    expect(groupForIntent(undefined)).toBe("other");
  });
});

describe("row styling", () => {
  it("derives distinct classes per group and politeness", () => {
    expect(rowClass({ t: 0, group: "navigational", politeness: "direct" }))
      .toBe("tl-navigational tl-direct");
    expect(rowClass({ t: 0, group: "conversational", politeness: "polite" }))
      .toBe("tl-conversational tl-polite");
  });
});
