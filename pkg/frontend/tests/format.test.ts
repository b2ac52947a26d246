import { describe, expect, it } from "vitest";

import { escapeHtml, groupByLabel, moderatedBadge, netScore, pluralise } from "../src/format";
import type { CommentRecord } from "../src/types";

function comment(id: string, label: string, flagged = false): CommentRecord {
  return {
    id,
    kind: "comment",
    parent: "p1",
    body: `body of ${id}`,
    pseudonym: "calm teal heron",
    publish_label: label,
    moderated_flag: flagged,
  };
}

describe("escapeHtml", () => {
  it("neutralises markup characters", () => {
    expect(escapeHtml(`<img src=x onerror="pwn('&')">`)).toBe(
      "&lt;img src=x onerror=&quot;pwn(&#39;&amp;&#39;)&quot;&gt;",
    );
  });

  it("leaves plain text alone", () => {
    expect(escapeHtml("nothing to see")).toBe("nothing to see");
  });
});

describe("groupByLabel", () => {
  it("groups consecutive comments under one label", () => {
    const groups = groupByLabel([
      comment("c1", "03/06/19 AM"),
      comment("c2", "03/06/19 AM"),
      comment("c3", "03/06/19 PM"),
    ]);
    expect(groups.map((g) => g.label)).toEqual(["03/06/19 AM", "03/06/19 PM"]);
    expect(groups[0].comments.map((c) => c.id)).toEqual(["c1", "c2"]);
    expect(groups[1].comments.map((c) => c.id)).toEqual(["c3"]);
  });

  it("preserves server order without re-sorting", () => {
    // labels are opaque; a repeated label after a gap starts a new group
    const groups = groupByLabel([
      comment("c1", "04/06/19 AM"),
      comment("c2", "04/06/19 PM"),
      comment("c3", "04/06/19 AM"),
    ]);
    expect(groups.map((g) => g.label)).toEqual([
      "04/06/19 AM",
      "04/06/19 PM",
      "04/06/19 AM",
    ]);
  });

  it("returns nothing for an empty thread", () => {
    expect(groupByLabel([])).toEqual([]);
  });
});

describe("moderatedBadge", () => {
  it("renders only when flagged", () => {
    expect(moderatedBadge(true)).toContain("moderated");
    expect(moderatedBadge(false)).toBe("");
  });
});

describe("netScore", () => {
  it("signs positive totals explicitly", () => {
    expect(netScore(3)).toBe("+3");
    expect(netScore(0)).toBe("0");
    expect(netScore(-2)).toBe("-2");
  });
});

describe("pluralise", () => {
  it("matches count", () => {
    expect(pluralise(1, "comment")).toBe("1 comment");
    expect(pluralise(4, "comment")).toBe("4 comments");
    expect(pluralise(0, "comment")).toBe("0 comments");
  });
});
