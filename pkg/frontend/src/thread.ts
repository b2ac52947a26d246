// Thread view: one post with its comments grouped under release dividers.

import { escapeHtml, groupByLabel, moderatedBadge, netScore, pluralise } from "./format";
import type { ThreadData } from "./types";

export function renderThread(data: ThreadData): string {
  const post = data.post;
  const title = post.title ? `<h2>${escapeHtml(post.title)}</h2>` : "";
  const parts: string[] = [];
  parts.push('<article class="post">');
  parts.push(title);
  parts.push(
    `<div class="meta">` +
      `<span class="pseudonym">${escapeHtml(post.pseudonym)}</span>` +
      `<span class="category">${escapeHtml(post.category)}</span>` +
      `<span class="label">${escapeHtml(post.publish_label)}</span>` +
      moderatedBadge(post.moderated_flag) +
      `</div>`,
  );
  parts.push(`<p class="body">${escapeHtml(post.body)}</p>`);
  // voting applies to posts only; comments carry no controls
  parts.push(
    `<div class="vote-controls">` +
      `<button data-action="vote-up" data-post="${escapeHtml(post.id)}">up</button>` +
      `<span class="net">${netScore(post.net_votes)}</span>` +
      `<button data-action="vote-down" data-post="${escapeHtml(post.id)}">down</button>` +
      `</div>`,
  );
  parts.push("</article>");

  if (data.comments.length > 0) {
    parts.push(`<h3 class="comment-count">${pluralise(data.comments.length, "comment")}</h3>`);
    parts.push('<section class="comments">');
    for (const group of groupByLabel(data.comments)) {
      parts.push(`<div class="release-divider">${escapeHtml(group.label)}</div>`);
      for (const comment of group.comments) {
        parts.push(
          `<div class="comment" data-id="${escapeHtml(comment.id)}">` +
            `<div class="meta">` +
            `<span class="pseudonym">${escapeHtml(comment.pseudonym)}</span>` +
            moderatedBadge(comment.moderated_flag) +
            `</div>` +
            `<p class="body">${escapeHtml(comment.body)}</p>` +
            `</div>`,
        );
      }
    }
    parts.push("</section>");
  }

  parts.push(
    `<form class="reply" data-action="comment-form" data-post="${escapeHtml(post.id)}">` +
      `<textarea name="body" placeholder="Add a comment"></textarea>` +
      `<button type="submit">Submit for review</button>` +
      `<p class="form-error" hidden></p>` +
      `</form>`,
  );
  return parts.join("\n");
}
