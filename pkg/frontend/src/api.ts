// Thin fetch wrapper over the service endpoints. The server is the only
// authority: this layer never caches outcomes or fabricates state, it just
// moves records and surfaces errors for the views to render.

import { moderatorHeaders, sessionHeaders } from "./session";
import type {
  BatchRecord,
  CategoryRecord,
  ChallengeKind,
  DecisionResult,
  ModerationSessionRecord,
  PostRecord,
  SessionInfo,
  SessionSummaryRecord,
  SubmitReceipt,
  ThreadData,
  VoteTally,
  VoteValue,
  WorklistItem,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

let fetcher: FetchLike = (input, init) => fetch(input, init);

// tests swap the transport out
export function setFetcher(f: FetchLike): void {
  fetcher = f;
}

async function call<T>(
  method: string,
  path: string,
  body?: unknown,
  headers: Record<string, string> = {},
): Promise<T> {
  const init: RequestInit = { method, headers: { ...headers } };
  if (body !== undefined) {
    (init.headers as Record<string, string>)["Content-Type"] = "application/json";
    init.body = JSON.stringify(body);
  }
  const response = await fetcher(path, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const parsed = await response.json();
      if (parsed && typeof parsed.detail === "string") detail = parsed.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

// -- access ------------------------------------------------------------

export function requestAccess(email: string): Promise<{ detail: string }> {
  return call("POST", "/access/request", { email });
}

export function redeemToken(token: string): Promise<SessionInfo> {
  return call("POST", "/access/redeem", { token });
}

export function registerAlternate(address: string): Promise<{ detail: string }> {
  return call("POST", "/session/alternate", { address }, sessionHeaders());
}

// -- reading -----------------------------------------------------------

export function categories(): Promise<CategoryRecord[]> {
  return call("GET", "/categories");
}

export function browse(
  category?: string,
  q?: string,
  sort: "newest" | "votes" = "newest",
): Promise<PostRecord[]> {
  const params = new URLSearchParams();
  if (category) params.set("category", category);
  if (q) params.set("q", q);
  params.set("sort", sort);
  return call("GET", `/posts?${params.toString()}`);
}

export function thread(postId: string): Promise<ThreadData> {
  return call("GET", `/posts/${encodeURIComponent(postId)}`);
}

export function batches(): Promise<BatchRecord[]> {
  return call("GET", "/batches");
}

// -- contributing --------------------------------------------------------

export function submitPost(
  category: string,
  body: string,
  title?: string,
): Promise<SubmitReceipt> {
  return call("POST", "/posts", { category, body, title: title || null }, sessionHeaders());
}

export function submitComment(postId: string, body: string): Promise<SubmitReceipt> {
  return call(
    "POST",
    `/posts/${encodeURIComponent(postId)}/comments`,
    { body },
    sessionHeaders(),
  );
}

export function castVote(postId: string, direction: "up" | "down"): Promise<VoteTally> {
  return call(
    "POST",
    `/posts/${encodeURIComponent(postId)}/vote`,
    { direction },
    sessionHeaders(),
  );
}

// -- moderating -----------------------------------------------------------

export function openModeration(
  moderatorIds: string[],
  targetRelease: string,
): Promise<ModerationSessionRecord> {
  return call(
    "POST",
    "/moderation/sessions",
    { moderator_ids: moderatorIds, target_release: targetRelease },
    moderatorHeaders(),
  );
}

export function moderationSessions(): Promise<ModerationSessionRecord[]> {
  return call("GET", "/moderation/sessions", undefined, moderatorHeaders());
}

export function worklist(sessionId: string): Promise<WorklistItem[]> {
  return call(
    "GET",
    `/moderation/sessions/${encodeURIComponent(sessionId)}/worklist`,
    undefined,
    moderatorHeaders(),
  );
}

export interface DecisionPayload {
  message_id: string;
  votes: Record<string, VoteValue>;
  challenge_kind: ChallengeKind;
  final_body?: string;
  reason?: string;
  rationale?: string;
}

export function recordDecision(
  sessionId: string,
  payload: DecisionPayload,
): Promise<DecisionResult> {
  return call(
    "POST",
    `/moderation/sessions/${encodeURIComponent(sessionId)}/decisions`,
    payload,
    moderatorHeaders(),
  );
}

export function closeModeration(sessionId: string): Promise<SessionSummaryRecord> {
  return call(
    "POST",
    `/moderation/sessions/${encodeURIComponent(sessionId)}/close`,
    undefined,
    moderatorHeaders(),
  );
}

export function health(): Promise<{ next_release: string }> {
  return call("GET", "/health");
}
