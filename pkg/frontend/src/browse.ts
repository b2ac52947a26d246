// Browse view: filterable, searchable list of published posts.

import { escapeHtml, moderatedBadge, netScore, pluralise } from "./format";
import type { CategoryRecord, PostRecord } from "./types";

export interface BrowseState {
  category: string;
  q: string;
  sort: "newest" | "votes";
}

export function renderBrowseControls(
  categories: CategoryRecord[],
  state: BrowseState,
): string {
  const options = categories
    .map((c) => {
      const selected = c.name === state.category ? " selected" : "";
      const reserved = c.reserved ? " (service)" : "";
      return `<option value="${escapeHtml(c.name)}"${selected}>${escapeHtml(c.name)}${reserved}</option>`;
    })
    .join("");
  return (
    `<form class="browse-controls" data-action="browse-form">` +
    `<select name="category"><option value="">All categories</option>${options}</select>` +
    `<input name="q" type="search" placeholder="Search" value="${escapeHtml(state.q)}">` +
    `<select name="sort">` +
    `<option value="newest"${state.sort === "newest" ? " selected" : ""}>Newest</option>` +
    `<option value="votes"${state.sort === "votes" ? " selected" : ""}>Most votes</option>` +
    `</select>` +
    `<button type="submit">Apply</button>` +
    `</form>`
  );
}

export function renderPostList(posts: PostRecord[]): string {
  if (posts.length === 0) {
    return '<p class="empty">No published posts match.</p>';
  }
  const rows = posts.map((post) => {
    const title = post.title ? escapeHtml(post.title) : "(untitled)";
    return (
      `<li class="post-row" data-id="${escapeHtml(post.id)}">` +
      `<a href="#/thread/${encodeURIComponent(post.id)}">${title}</a>` +
      `<div class="meta">` +
      `<span class="pseudonym">${escapeHtml(post.pseudonym)}</span>` +
      `<span class="category">${escapeHtml(post.category)}</span>` +
      `<span class="label">${escapeHtml(post.publish_label)}</span>` +
      moderatedBadge(post.moderated_flag) +
      `<span class="net">${netScore(post.net_votes)}</span>` +
      `<span class="comments">${pluralise(post.comment_count, "comment")}</span>` +
      `</div>` +
      `</li>`
    );
  });
  return `<ul class="post-list">${rows.join("\n")}</ul>`;
}
