// Timeline strip rows: one per visitor utterance, grouped by intent family
// and shaded by politeness. The grouping mirrors the server's analysis
// export so both render the same strip.

export type CategoryGroup = "navigational" | "conversational" | "other";

export interface TimelineRow {
  t: number;
  group: CategoryGroup;
  politeness: "polite" | "direct";
}

export function groupForIntent(intent: string | undefined): CategoryGroup {
  switch (intent) {
    case "low_level_control":
    case "high_level_control":
      return "navigational";
    case "inquiry_about_museum":
      return "conversational";
    default:
      return "other";
  }
}

export function rowClass(row: TimelineRow): string {
  return `tl-${row.group} tl-${row.politeness}`;
}
