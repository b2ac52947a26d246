import { afterEach, describe, expect, it } from "vitest";

import * as api from "../src/api";
import { ApiError, setFetcher } from "../src/api";
import { clearModerator, clearSession, setModerator, setSession } from "../src/session";

interface Call {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

function capture(reply: unknown = {}, status = 200): Call[] {
  const calls: Call[] = [];
  setFetcher(async (url, init) => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    return new Response(JSON.stringify(reply), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  });
  return calls;
}

afterEach(() => {
  clearSession();
  clearModerator();
  setFetcher((input, init) => fetch(input, init));
});

describe("request shapes", () => {
  it("posts the address for an access request", async () => {
    const calls = capture({ detail: "ok" });
    await api.requestAccess("a@example.org");
    expect(calls[0]).toMatchObject({
      url: "/access/request",
      method: "POST",
      body: { email: "a@example.org" },
    });
  });

  it("builds browse queries from the filters", async () => {
    const calls = capture([]);
    await api.browse("Pay and Conditions", "overtime", "votes");
    expect(calls[0].url).toBe("/posts?category=Pay+and+Conditions&q=overtime&sort=votes");
    await api.browse();
    expect(calls[1].url).toBe("/posts?sort=newest");
  });

  it("escapes ids in paths", async () => {
    const calls = capture({ post: {}, comments: [] });
    await api.thread("weird/id");
    expect(calls[0].url).toBe("/posts/weird%2Fid");
  });

  it("attaches the session header to contributions", async () => {
    setSession({
      session_id: "s-9",
      pseudonym: "dry amber wren",
      expires_at: "2019-06-03T18:00:00+00:00",
    });
    const calls = capture({ message_id: "x", status: "queued", next_release: "y" });
    await api.submitPost("General", "hello");
    await api.submitComment("p1", "same here");
    await api.castVote("p1", "up");
    for (const call of calls) {
      expect(call.headers["X-Session"]).toBe("s-9");
    }
    expect(calls[0].body).toEqual({ category: "General", body: "hello", title: null });
    expect(calls[1].url).toBe("/posts/p1/comments");
    expect(calls[2].body).toEqual({ direction: "up" });
  });

  it("attaches moderator headers to moderation calls", async () => {
    setModerator("m2", "pw-two");
    const calls = capture([]);
    await api.moderationSessions();
    await api.worklist("s1");
    expect(calls[0].headers["X-Moderator-Id"]).toBe("m2");
    expect(calls[1].headers["X-Moderator-Secret"]).toBe("pw-two");
    expect(calls[1].url).toBe("/moderation/sessions/s1/worklist");
  });

  it("sends the full decision payload", async () => {
    setModerator("m1", "pw-one");
    const calls = capture({
      message_id: "w1",
      outcome: "publish_edited",
      approve_count: 2,
      challenge_count: 1,
    });
    await api.recordDecision("s1", {
      message_id: "w1",
      votes: { m1: "challenge", m2: "approve", m3: "approve" },
      challenge_kind: "edit",
      final_body: "tidied",
      reason: "typos",
      rationale: "fixed spelling",
    });
    expect(calls[0].url).toBe("/moderation/sessions/s1/decisions");
    expect(calls[0].body).toMatchObject({
      message_id: "w1",
      challenge_kind: "edit",
      final_body: "tidied",
      reason: "typos",
    });
  });
});

describe("error handling", () => {
  it("raises ApiError with the server detail", async () => {
    capture({ detail: "no such published post" }, 404);
    try {
      await api.thread("ghost");
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(404);
      expect((err as ApiError).detail).toBe("no such published post");
    }
  });

  it("falls back to status text for non-JSON errors", async () => {
    setFetcher(async () => new Response("gateway exploded", { status: 502, statusText: "Bad Gateway" }));
    try {
      await api.health();
      expect.unreachable("should have thrown");
    } catch (err) {
      expect((err as ApiError).status).toBe(502);
      expect((err as ApiError).detail).toBe("Bad Gateway");
    }
  });
});
