// Volatile credential store. Everything here lives in module state and
// dies with the tab: tokens and session ids must never touch localStorage,
// sessionStorage, cookies, or any other persistent surface.

import type { SessionInfo } from "./types";

interface ModeratorCreds {
  id: string;
  secret: string;
}

let current: SessionInfo | null = null;
let moderator: ModeratorCreds | null = null;

export function setSession(info: SessionInfo): void {
  current = info;
}

export function clearSession(): void {
  current = null;
}

export function session(): SessionInfo | null {
  return current;
}

export function sessionHeaders(): Record<string, string> {
  return current ? { "X-Session": current.session_id } : {};
}

export function setModerator(id: string, secret: string): void {
  moderator = { id, secret };
}

export function clearModerator(): void {
  moderator = null;
}

export function moderatorId(): string | null {
  return moderator ? moderator.id : null;
}

export function moderatorHeaders(): Record<string, string> {
  if (!moderator) return {};
  return {
    "X-Moderator-Id": moderator.id,
    "X-Moderator-Secret": moderator.secret,
  };
}
