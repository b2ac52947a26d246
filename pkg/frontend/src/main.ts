// Hash-routed single page app. Mailed sign-in links land on /ui/ with the
// one-time token in the fragment, which never reaches the server; every
// route the app itself uses starts with "/" so a bare fragment is always a
// redeem attempt.

import * as api from "./api";
import { ApiError } from "./api";
import { renderBrowseControls, renderPostList, type BrowseState } from "./browse";
import {
  renderComposeForm,
  renderReceipt,
  renderSessionExpired,
  validateDraft,
} from "./compose";
import {
  draftError,
  emptyDraft,
  renderConsole,
  renderSummary,
  type ItemDraft,
} from "./console";
import { escapeHtml } from "./format";
import {
  clearModerator,
  clearSession,
  moderatorId,
  session,
  setModerator,
  setSession,
} from "./session";
import { renderThread } from "./thread";
import type { DecisionResult, ModerationSessionRecord, WorklistItem } from "./types";

const browseState: BrowseState = { category: "", q: "", sort: "newest" };

interface ConsoleState {
  record: ModerationSessionRecord | null;
  items: WorklistItem[];
  drafts: Map<string, ItemDraft>;
  decidedLog: DecisionResult[];
}

const consoleState: ConsoleState = {
  record: null,
  items: [],
  drafts: new Map(),
  decidedLog: [],
};

function view(): HTMLElement {
  return document.getElementById("view") as HTMLElement;
}

function setFlash(html: string): void {
  const flash = document.getElementById("flash") as HTMLElement;
  flash.innerHTML = html;
}

function errorText(err: unknown): string {
  if (err instanceof ApiError) return err.detail;
  return "The service could not be reached.";
}

function renderFetchError(err: unknown): string {
  return (
    `<p class="error">${escapeHtml(errorText(err))}</p>` +
    `<button data-action="retry">Try again</button>`
  );
}

function renderNav(): void {
  const nav = document.getElementById("nav") as HTMLElement;
  const who = session()
    ? `<span class="who">${escapeHtml(session()!.pseudonym)}</span>`
    : `<a href="#/login">Sign in</a>`;
  nav.innerHTML =
    `<a href="#/browse">Browse</a>` +
    `<a href="#/compose">New post</a>` +
    `<a href="#/console">Moderation</a>` +
    who;
}

// -- views ---------------------------------------------------------------

function showLogin(notice = ""): void {
  view().innerHTML =
    (notice ? `<p class="notice">${escapeHtml(notice)}</p>` : "") +
    `<form data-action="login-form">` +
    `<p>Enter your work address. If it is eligible, a one-time sign-in link ` +
    `will be mailed to you.</p>` +
    `<input name="email" type="email" placeholder="you@example.org" required>` +
    `<button type="submit">Request link</button>` +
    `</form>`;
}

async function showBrowse(): Promise<void> {
  try {
    const [cats, posts] = await Promise.all([
      api.categories(),
      api.browse(browseState.category || undefined, browseState.q || undefined, browseState.sort),
    ]);
    view().innerHTML = renderBrowseControls(cats, browseState) + renderPostList(posts);
  } catch (err) {
    view().innerHTML = renderFetchError(err);
  }
}

async function showThread(postId: string): Promise<void> {
  try {
    const data = await api.thread(postId);
    view().innerHTML = renderThread(data);
  } catch (err) {
    view().innerHTML = renderFetchError(err);
  }
}

async function showCompose(): Promise<void> {
  if (!session()) {
    view().innerHTML = renderSessionExpired();
    return;
  }
  try {
    const cats = await api.categories();
    view().innerHTML = renderComposeForm(cats);
  } catch (err) {
    view().innerHTML = renderFetchError(err);
  }
}

function showModeratorLogin(notice = ""): void {
  view().innerHTML =
    (notice ? `<p class="notice">${escapeHtml(notice)}</p>` : "") +
    `<form data-action="moderator-form">` +
    `<p>Moderator sign-in.</p>` +
    `<input name="id" placeholder="moderator id" required>` +
    `<input name="secret" type="password" placeholder="secret" required>` +
    `<button type="submit">Continue</button>` +
    `</form>`;
}

async function showConsole(): Promise<void> {
  if (!moderatorId()) {
    showModeratorLogin();
    return;
  }
  try {
    const sessions = await api.moderationSessions();
    if (sessions.length === 0) {
      const h = await api.health();
      view().innerHTML =
        `<form data-action="open-form">` +
        `<p>No session is open. Gather at least three moderators to start one.</p>` +
        `<input name="moderators" value="${escapeHtml(moderatorId() ?? "")}" ` +
        `placeholder="comma-separated moderator ids">` +
        `<input name="target" value="${escapeHtml(h.next_release)}">` +
        `<button type="submit">Open session</button>` +
        `</form>`;
      return;
    }
    consoleState.record = sessions[0];
    consoleState.items = await api.worklist(sessions[0].id);
    renderConsoleView();
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      clearModerator();
      showModeratorLogin("Those credentials were not accepted.");
      return;
    }
    view().innerHTML = renderFetchError(err);
  }
}

function renderConsoleView(): void {
  if (!consoleState.record) return;
  view().innerHTML = renderConsole(
    consoleState.record,
    consoleState.items,
    consoleState.drafts,
    consoleState.decidedLog,
  );
}

async function refreshConsole(): Promise<void> {
  const sessions = await api.moderationSessions();
  if (sessions.length === 0) {
    consoleState.record = null;
    await showConsole();
    return;
  }
  consoleState.record = sessions[0];
  consoleState.items = await api.worklist(sessions[0].id);
  renderConsoleView();
}

// -- router -----------------------------------------------------------

async function handleRedeem(token: string): Promise<void> {
  try {
    const info = await api.redeemToken(token);
    setSession(info);
    renderNav();
    // drop the spent token from the address bar before moving on
    history.replaceState(null, "", window.location.pathname);
    window.location.hash = "#/browse";
  } catch (err) {
    history.replaceState(null, "", window.location.pathname);
    showLogin(errorText(err));
  }
}

export async function route(): Promise<void> {
  const hash = window.location.hash.slice(1);
  if (hash && !hash.startsWith("/")) {
    await handleRedeem(hash);
    return;
  }
  setFlash("");
  const parts = hash.split("/");
  const page = parts[1] ?? "";
  const arg = parts.slice(2).join("/");
  switch (page) {
    case "":
    case "browse":
      await showBrowse();
      break;
    case "thread":
      await showThread(decodeURIComponent(arg));
      break;
    case "compose":
      await showCompose();
      break;
    case "console":
      await showConsole();
      break;
    case "login":
      showLogin();
      break;
    default:
      await showBrowse();
  }
}

// -- event handling ----------------------------------------------------

function formValue(form: HTMLFormElement, name: string): string {
  const field = form.elements.namedItem(name) as
    | HTMLInputElement
    | HTMLTextAreaElement
    | HTMLSelectElement
    | null;
  return field ? field.value : "";
}

function showFormError(form: HTMLFormElement, message: string): void {
  const slot = form.querySelector(".form-error") as HTMLElement | null;
  if (slot) {
    slot.textContent = message;
    slot.hidden = false;
  }
}

async function onSubmit(event: Event): Promise<void> {
  const form = event.target as HTMLFormElement;
  const action = form.dataset.action;
  if (!action) return;
  event.preventDefault();

  if (action === "login-form") {
    try {
      const reply = await api.requestAccess(formValue(form, "email"));
      view().innerHTML = `<p class="notice">${escapeHtml(reply.detail)}</p>`;
    } catch (err) {
      showLogin(errorText(err));
    }
    return;
  }

  if (action === "browse-form") {
    browseState.category = formValue(form, "category");
    browseState.q = formValue(form, "q");
    browseState.sort = formValue(form, "sort") === "votes" ? "votes" : "newest";
    await showBrowse();
    return;
  }

  if (action === "compose-form") {
    const body = formValue(form, "body");
    const invalid = validateDraft(body);
    if (invalid) {
      showFormError(form, invalid);
      return;
    }
    try {
      const receipt = await api.submitPost(
        formValue(form, "category"),
        body,
        formValue(form, "title") || undefined,
      );
      view().innerHTML = renderReceipt(receipt);
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        clearSession();
        renderNav();
        view().innerHTML = renderSessionExpired();
      } else {
        showFormError(form, errorText(err));
      }
    }
    return;
  }

  if (action === "comment-form") {
    const body = formValue(form, "body");
    const invalid = validateDraft(body);
    if (invalid) {
      showFormError(form, invalid);
      return;
    }
    try {
      const receipt = await api.submitComment(form.dataset.post ?? "", body);
      setFlash(renderReceipt(receipt));
      (form.elements.namedItem("body") as HTMLTextAreaElement).value = "";
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        clearSession();
        renderNav();
        view().innerHTML = renderSessionExpired();
      } else {
        showFormError(form, errorText(err));
      }
    }
    return;
  }

  if (action === "moderator-form") {
    setModerator(formValue(form, "id"), formValue(form, "secret"));
    await showConsole();
    return;
  }

  if (action === "open-form") {
    const ids = formValue(form, "moderators")
      .split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    try {
      await api.openModeration(ids, formValue(form, "target"));
      await showConsole();
    } catch (err) {
      setFlash(`<p class="error">${escapeHtml(errorText(err))}</p>`);
    }
    return;
  }
}

function showItemError(itemId: string, message: string): void {
  const item = view().querySelector(`.worklist-item[data-id="${itemId}"]`);
  const slot = item?.querySelector(".item-error") as HTMLElement | null;
  if (slot) {
    slot.textContent = message;
    slot.hidden = false;
  }
}

async function onClick(event: Event): Promise<void> {
  const target = (event.target as HTMLElement).closest("[data-action]") as
    | HTMLElement
    | null;
  if (!target) return;
  const action = target.dataset.action;

  if (action === "vote-up" || action === "vote-down") {
    const postId = target.dataset.post ?? "";
    try {
      await api.castVote(postId, action === "vote-up" ? "up" : "down");
      await showThread(postId);
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        setFlash('<p class="error">Sign in again to vote.</p>');
      } else {
        setFlash(`<p class="error">${escapeHtml(errorText(err))}</p>`);
      }
    }
    return;
  }

  if (action === "ballot") {
    const itemId = target.dataset.item ?? "";
    const mod = target.dataset.moderator ?? "";
    const vote = target.dataset.vote === "challenge" ? "challenge" : "approve";
    const draft = consoleState.drafts.get(itemId) ?? emptyDraft();
    draft.votes[mod] = vote;
    consoleState.drafts.set(itemId, draft);
    renderConsoleView();
    return;
  }

  if (action === "record") {
    const itemId = target.dataset.item ?? "";
    const item = consoleState.items.find((i) => i.id === itemId);
    if (!item || !consoleState.record) return;
    const draft = consoleState.drafts.get(itemId) ?? emptyDraft();
    const invalid = draftError(draft, item.held);
    if (invalid) {
      showItemError(itemId, invalid);
      return;
    }
    const payload: api.DecisionPayload = {
      message_id: itemId,
      votes: draft.votes,
      challenge_kind: draft.challengeKind,
    };
    if (draft.challengeKind === "edit") {
      payload.final_body = draft.finalBody;
      payload.reason = draft.reason;
    }
    if (draft.rationale.trim() !== "") {
      payload.rationale = draft.rationale;
    }
    try {
      const result = await api.recordDecision(consoleState.record.id, payload);
      consoleState.decidedLog.push(result);
      consoleState.drafts.delete(itemId);
      await refreshConsole();
    } catch (err) {
      showItemError(itemId, errorText(err));
    }
    return;
  }

  if (action === "retry") {
    await route();
    return;
  }

  if (action === "close-session") {
    if (!consoleState.record) return;
    try {
      const summary = await api.closeModeration(consoleState.record.id);
      consoleState.record = null;
      consoleState.items = [];
      consoleState.drafts.clear();
      consoleState.decidedLog = [];
      view().innerHTML = renderSummary(summary);
    } catch (err) {
      setFlash(`<p class="error">${escapeHtml(errorText(err))}</p>`);
    }
    return;
  }
}

function onFieldChange(event: Event): void {
  const target = event.target as HTMLElement;
  const field = target.dataset.field;
  if (!field) return;
  const itemId = target.dataset.item ?? "";
  const value = (target as HTMLInputElement).value;
  const draft = consoleState.drafts.get(itemId) ?? emptyDraft();
  if (field === "challenge_kind") {
    draft.challengeKind = value as ItemDraft["challengeKind"];
  } else if (field === "final_body") {
    draft.finalBody = value;
  } else if (field === "reason") {
    draft.reason = value;
  } else if (field === "rationale") {
    draft.rationale = value;
  }
  consoleState.drafts.set(itemId, draft);
  // selects re-render immediately so dependent panes follow the choice;
  // free-text fields wait for blur to avoid stealing focus
  if (field === "challenge_kind" || field === "reason") {
    renderConsoleView();
  }
}

export function init(): void {
  renderNav();
  const root = document.getElementById("app") as HTMLElement;
  root.addEventListener("submit", (e) => void onSubmit(e));
  root.addEventListener("click", (e) => void onClick(e));
  root.addEventListener("change", onFieldChange);
  window.addEventListener("hashchange", () => void route());
  void route();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  init();
}
