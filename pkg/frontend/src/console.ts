// Moderation console. The preview logic here mirrors the server's quorum
// rules for display only; the recorded outcome always comes back from the
// service and is what the console reports as final.

import { escapeHtml } from "./format";
import type {
  ChallengeKind,
  DecisionResult,
  ModerationSessionRecord,
  Outcome,
  SessionSummaryRecord,
  VoteValue,
  WorklistItem,
} from "./types";

export const QUORUM = 3;

export interface ItemDraft {
  votes: Record<string, VoteValue>;
  challengeKind: ChallengeKind;
  finalBody: string;
  reason: string;
  rationale: string;
}

export function emptyDraft(): ItemDraft {
  return { votes: {}, challengeKind: "none", finalBody: "", reason: "", rationale: "" };
}

export function canDecide(present: string[]): boolean {
  return present.length >= QUORUM;
}

// The worklist only lists undecided messages, so the session is closeable
// exactly when its undecided counter reaches zero. Held items re-enter the
// list for a second round and keep the session open until resolved.
export function closeEnabled(undecided: number): boolean {
  return undecided === 0;
}

export type PreviewResult = Outcome;

// Display-only mirror of the server's resolution table. Returns null while
// the draft is incomplete or inconsistent (fewer than QUORUM votes, or a
// challenge kind that disagrees with the ballots).
export function previewOutcome(
  votes: VoteValue[],
  kind: ChallengeKind,
  previouslyHeld: boolean,
): PreviewResult | null {
  if (votes.length < QUORUM) return null;
  const approvals = votes.filter((v) => v === "approve").length;
  const challenges = votes.length - approvals;
  if (challenges > 0 !== (kind !== "none")) return null;

  if (challenges === 0) return "publish_as_is";

  if (previouslyHeld) {
    if (kind === "anonymity" && challenges === votes.length) return "reject_anonymity";
    if (approvals > challenges) return kind === "edit" ? "publish_edited" : "publish_as_is";
    return "reject_civility";
  }

  if (kind === "anonymity") {
    return challenges === votes.length ? "reject_anonymity" : "held";
  }
  if (kind === "civility") {
    if (challenges > approvals) return "reject_civility";
    if (approvals > challenges) return "publish_as_is";
    return "held";
  }
  // edit
  return approvals > challenges ? "publish_edited" : "held";
}

export function previewLabel(result: PreviewResult | null): string {
  if (result === null) return "awaiting ballots";
  if (result === "held") return "held for a second round";
  if (result === "publish_as_is") return "publish as-is";
  if (result === "publish_edited") return "publish with edits";
  if (result === "reject_anonymity") return "reject (anonymity)";
  return "reject (civility)";
}

// A draft is submittable when the preview resolves and the supporting
// fields the outcome demands are present.
export function draftError(draft: ItemDraft, previouslyHeld: boolean): string | null {
  const ballots = Object.values(draft.votes);
  const result = previewOutcome(ballots, draft.challengeKind, previouslyHeld);
  if (result === null) {
    return ballots.length < QUORUM
      ? "Every present moderator must vote."
      : "Ballots and challenge type disagree.";
  }
  if (result === "publish_edited") {
    if (draft.finalBody.trim() === "") return "Provide the edited text.";
    if (!["typos", "formatting", "clarification"].includes(draft.reason)) {
      return "Pick an edit reason.";
    }
  }
  if (result !== "publish_as_is" && draft.rationale.trim() === "") {
    return "A rationale is required for this outcome.";
  }
  return null;
}

export function renderQuorumBanner(present: string[]): string {
  if (canDecide(present)) {
    return `<p class="quorum-ok">Quorum met: ${present.length} moderators present.</p>`;
  }
  return (
    `<div class="banner quorum-short">` +
    `Only ${present.length} moderator${present.length === 1 ? "" : "s"} present. ` +
    `At least ${QUORUM} must attend before any decision can be recorded.` +
    `</div>`
  );
}

export function renderWorklistItem(
  item: WorklistItem,
  draft: ItemDraft,
  present: string[],
): string {
  const disabled = canDecide(present) ? "" : " disabled";
  const title = item.title ? `<h4>${escapeHtml(item.title)}</h4>` : "";
  const kindNote =
    item.kind === "comment" && item.parent_post
      ? `<span class="parent">comment on ${escapeHtml(item.parent_post)}</span>`
      : `<span class="category">${escapeHtml(item.category ?? "")}</span>`;
  const heldNote = item.held
    ? '<span class="badge held">held, second round</span>'
    : "";

  const ballots = present
    .map((mod) => {
      const vote = draft.votes[mod];
      return (
        `<div class="ballot" data-moderator="${escapeHtml(mod)}">` +
        `<span>${escapeHtml(mod)}</span>` +
        `<button data-action="ballot" data-item="${escapeHtml(item.id)}" ` +
        `data-moderator="${escapeHtml(mod)}" data-vote="approve"` +
        `${vote === "approve" ? ' class="active"' : ""}${disabled}>approve</button>` +
        `<button data-action="ballot" data-item="${escapeHtml(item.id)}" ` +
        `data-moderator="${escapeHtml(mod)}" data-vote="challenge"` +
        `${vote === "challenge" ? ' class="active"' : ""}${disabled}>challenge</button>` +
        `</div>`
      );
    })
    .join("");

  const kinds: ChallengeKind[] = ["none", "edit", "civility", "anonymity"];
  const kindOptions = kinds
    .map(
      (k) =>
        `<option value="${k}"${draft.challengeKind === k ? " selected" : ""}>${k}</option>`,
    )
    .join("");

  const editPane =
    draft.challengeKind === "edit"
      ? `<div class="edit-pane">` +
        `<textarea data-field="final_body" data-item="${escapeHtml(item.id)}" ` +
        `placeholder="Edited text">${escapeHtml(draft.finalBody)}</textarea>` +
        `<select data-field="reason" data-item="${escapeHtml(item.id)}">` +
        `<option value="">reason…</option>` +
        ["typos", "formatting", "clarification"]
          .map(
            (r) =>
              `<option value="${r}"${draft.reason === r ? " selected" : ""}>${r}</option>`,
          )
          .join("") +
        `</select>` +
        `</div>`
      : "";

  const preview = previewOutcome(
    Object.values(draft.votes),
    draft.challengeKind,
    item.held,
  );

  return (
    `<article class="worklist-item" data-id="${escapeHtml(item.id)}">` +
    title +
    `<div class="meta">` +
    `<span class="pseudonym">${escapeHtml(item.pseudonym)}</span>` +
    kindNote +
    heldNote +
    `</div>` +
    `<p class="body">${escapeHtml(item.body)}</p>` +
    `<div class="ballots">${ballots}</div>` +
    `<label>Challenge type ` +
    `<select data-field="challenge_kind" data-item="${escapeHtml(item.id)}"${disabled}>` +
    kindOptions +
    `</select></label>` +
    editPane +
    `<input data-field="rationale" data-item="${escapeHtml(item.id)}" ` +
    `placeholder="Rationale (required unless publishing as-is)" ` +
    `value="${escapeHtml(draft.rationale)}"${disabled}>` +
    `<p class="preview">Preview: ${previewLabel(preview)}</p>` +
    `<button data-action="record" data-item="${escapeHtml(item.id)}"${disabled}>` +
    `Record decision</button>` +
    `<p class="item-error" hidden></p>` +
    `</article>`
  );
}

export function renderDecidedLog(log: DecisionResult[]): string {
  if (log.length === 0) return "";
  const rows = log
    .map(
      (d) =>
        `<li data-id="${escapeHtml(d.message_id)}">` +
        `${escapeHtml(d.message_id)}: ${previewLabel(d.outcome)} ` +
        `(${d.approve_count} approve, ${d.challenge_count} challenge)</li>`,
    )
    .join("");
  return `<details class="decided-log" open><summary>Recorded this session</summary><ul>${rows}</ul></details>`;
}

export function renderConsole(
  record: ModerationSessionRecord,
  items: WorklistItem[],
  drafts: Map<string, ItemDraft>,
  decidedLog: DecisionResult[],
): string {
  const present = record.moderators_present;
  const banner = renderQuorumBanner(present);
  const rows = items
    .map((item) => renderWorklistItem(item, drafts.get(item.id) ?? emptyDraft(), present))
    .join("\n");
  const decided = record.worklist_size - record.undecided;
  const closeButton =
    `<button data-action="close-session" data-session="${escapeHtml(record.id)}"` +
    `${closeEnabled(record.undecided) ? "" : " disabled"}>Close session</button>`;
  return (
    `<section class="console">` +
    `<h2>Moderation session</h2>` +
    `<p class="target">Publishing into the release of ${escapeHtml(record.target_release)}.</p>` +
    banner +
    `<p class="progress">${decided} of ${record.worklist_size} decided.</p>` +
    (items.length === 0 ? '<p class="empty">Nothing left to decide.</p>' : rows) +
    renderDecidedLog(decidedLog) +
    closeButton +
    `</section>`
  );
}

export function renderSummary(summary: SessionSummaryRecord): string {
  const reasons = Object.entries(summary.rejected_reasons)
    .map(([reason, count]) => `<li>${escapeHtml(reason)}: ${count}</li>`)
    .join("");
  return (
    `<div class="session-summary">` +
    `<p>Session closed. Published: ${summary.published_count}. ` +
    `Modified: ${summary.modified_count}. ` +
    `Rejected: ${summary.rejected_count}.</p>` +
    (reasons ? `<ul>${reasons}</ul>` : "") +
    `</div>`
  );
}
