// Pure formatting helpers shared by the views. Everything here returns
// strings so the render layer stays testable without a DOM.

import type { CommentRecord } from "./types";

const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => HTML_ESCAPES[ch]);
}

export interface LabelGroup {
  label: string;
  comments: CommentRecord[];
}

// Group comments under their release label, preserving the order the
// server returned them in. Labels are opaque strings here; the server
// already formatted them and the view must show them verbatim.
export function groupByLabel(comments: CommentRecord[]): LabelGroup[] {
  const groups: LabelGroup[] = [];
  let current: LabelGroup | null = null;
  for (const comment of comments) {
    if (current === null || current.label !== comment.publish_label) {
      current = { label: comment.publish_label, comments: [] };
      groups.push(current);
    }
    current.comments.push(comment);
  }
  return groups;
}

export function moderatedBadge(flagged: boolean): string {
  return flagged ? '<span class="badge moderated">moderated</span>' : "";
}

export function netScore(net: number): string {
  return net > 0 ? `+${net}` : String(net);
}

export function pluralise(count: number, noun: string): string {
  return count === 1 ? `1 ${noun}` : `${count} ${noun}s`;
}
