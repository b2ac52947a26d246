// Compose view: draft a new post and hand it to the moderation queue.

import { escapeHtml } from "./format";
import type { CategoryRecord, SubmitReceipt } from "./types";

export function renderComposeForm(categories: CategoryRecord[]): string {
  const options = categories
    .filter((c) => !c.reserved)
    .map((c) => `<option value="${escapeHtml(c.name)}">${escapeHtml(c.name)}</option>`)
    .join("");
  return (
    `<form class="compose" data-action="compose-form">` +
    `<select name="category">${options}</select>` +
    `<input name="title" type="text" placeholder="Title (optional)">` +
    `<textarea name="body" placeholder="What do you want to raise?"></textarea>` +
    `<button type="submit">Submit for review</button>` +
    `<p class="form-error" hidden></p>` +
    `</form>`
  );
}

// Runs before anything is sent; an empty body never leaves the client.
export function validateDraft(body: string): string | null {
  if (body.trim() === "") {
    return "Write something before submitting.";
  }
  return null;
}

export function renderReceipt(receipt: SubmitReceipt): string {
  return (
    `<div class="receipt">` +
    `<p>Your message is ${escapeHtml(receipt.status)}.</p>` +
    `<p>If approved it will appear in the release of ` +
    `<strong>${escapeHtml(receipt.next_release)}</strong>.</p>` +
    `</div>`
  );
}

export function renderSessionExpired(): string {
  return (
    `<div class="session-expired">` +
    `<p>Your session has expired. Request a fresh sign-in link to continue.</p>` +
    `<a href="#/login">Request a new link</a>` +
    `</div>`
  );
}
