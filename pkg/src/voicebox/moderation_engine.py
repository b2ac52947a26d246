"""Quorum moderation: every message is reviewed before it can be released.

A session is a meeting of at least three moderators held before a release
instant. The session snapshots the pending queue as its worklist, decides
each message by recorded votes, and closes with an automatic transparency
summary posted to the reserved Moderators category. Rejected bodies are
erased the moment the rejection is recorded; only the rationale survives.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Mapping, Optional

from .clock import Clock
from .content_store import ContentStore, KIND_COMMENT, KIND_POST
from .errors import ServiceError, ValidationError

VOTE_APPROVE = "approve"
VOTE_CHALLENGE = "challenge"

KIND_NONE = "none"
KIND_EDIT = "edit"
KIND_CIVILITY = "civility"
KIND_ANONYMITY = "anonymity"
CHALLENGE_KINDS = (KIND_NONE, KIND_EDIT, KIND_CIVILITY, KIND_ANONYMITY)

PUBLISH_AS_IS = "publish_as_is"
PUBLISH_EDITED = "publish_edited"
REJECT_CIVILITY = "reject_civility"
REJECT_ANONYMITY = "reject_anonymity"
HELD = "held"

# Enumerated edit reasons; the analytics reason histogram is built from these.
REASON_TYPOS = "typos"
REASON_FORMATTING = "formatting"
REASON_CLARIFICATION = "clarification"
EDIT_REASONS = (REASON_TYPOS, REASON_FORMATTING, REASON_CLARIFICATION)

MIN_QUORUM = 3


class QuorumError(ServiceError):
    pass


class SessionStateError(ServiceError):
    pass


def resolve(
    votes: Mapping[str, str],
    challenge_kind: str,
    previously_held: bool = False,
) -> str:
    """Pure decision rule mapping a vote set to an outcome.

    With no challenge the message publishes as submitted. An edit challenge
    publishes the edited text when a majority approves it. An anonymity
    challenge can only reject unanimously; any dissent holds the message for
    rework within the session. A civility challenge rejects on a majority.
    Split panels hold the message once; a re-resolution of a held message
    must reach majority approval or the message is rejected, except that a
    unanimous anonymity challenge still rejects on anonymity grounds.
    """
    if len(votes) < MIN_QUORUM:
        raise QuorumError(f"resolution requires at least {MIN_QUORUM} votes")
    if challenge_kind not in CHALLENGE_KINDS:
        raise ValidationError(f"unknown challenge kind: {challenge_kind}")
    for voter, vote in votes.items():
        if vote not in (VOTE_APPROVE, VOTE_CHALLENGE):
            raise ValidationError(f"unknown vote from {voter}: {vote}")
    n = len(votes)
    challenges = sum(1 for v in votes.values() if v == VOTE_CHALLENGE)
    approvals = n - challenges
    if (challenges > 0) != (challenge_kind != KIND_NONE):
        raise ValidationError("challenge kind inconsistent with the votes cast")
    if challenges == 0:
        return PUBLISH_AS_IS
    majority_approve = approvals * 2 > n
    majority_challenge = challenges * 2 > n
    if previously_held:
        if challenge_kind == KIND_ANONYMITY and challenges == n:
            return REJECT_ANONYMITY
        if majority_approve:
            return PUBLISH_EDITED if challenge_kind == KIND_EDIT else PUBLISH_AS_IS
        return REJECT_CIVILITY
    if challenge_kind == KIND_ANONYMITY:
        return REJECT_ANONYMITY if challenges == n else HELD
    if challenge_kind == KIND_CIVILITY:
        if majority_challenge:
            return REJECT_CIVILITY
        if majority_approve:
            return PUBLISH_AS_IS
        return HELD
    # edit challenge: majority must approve the proposed text
    if majority_approve:
        return PUBLISH_EDITED
    return HELD


@dataclass(frozen=True)
class Decision:
    message_id: str
    outcome: str
    votes: dict[str, str]
    challenge_kind: str
    reason: Optional[str]
    rationale: Optional[str]
    decided_at: datetime

    @property
    def is_final(self) -> bool:
        return self.outcome != HELD


@dataclass(frozen=True)
class SessionSummary:
    session_id: str
    target_release: datetime
    top_posts: tuple[dict, ...]
    published_count: int
    modified_count: int
    modified_reasons: dict[str, int]
    rejected_count: int
    rejected_reasons: dict[str, int]
    summary_post_id: Optional[str] = None


@dataclass
class ModerationSession:
    id: str
    target_release: datetime
    moderators_present: set[str]
    opened_at: datetime
    worklist: tuple[str, ...]
    state: str = "open"
    decisions: list[Decision] = field(default_factory=list)
    summary: Optional[SessionSummary] = None

    def final_decisions(self) -> dict[str, Decision]:
        return {d.message_id: d for d in self.decisions if d.is_final}

    def held_ids(self) -> set[str]:
        final = {d.message_id for d in self.decisions if d.is_final}
        return {
            d.message_id
            for d in self.decisions
            if d.outcome == HELD and d.message_id not in final
        }

    def undecided(self) -> list[str]:
        final = {d.message_id for d in self.decisions if d.is_final}
        return [mid for mid in self.worklist if mid not in final]


class ModerationEngine:
    def __init__(self, store: ContentStore, clock: Clock, roster_ids):
        """roster_ids: zero-argument callable returning the valid moderator ids."""
        self._store = store
        self._clock = clock
        self._roster_ids = roster_ids
        self._sessions: dict[str, ModerationSession] = {}
        self._lock = threading.RLock()

    # -- session lifecycle -----------------------------------------------------

    def open_session(
        self, moderator_ids: Iterable[str], target_release: datetime
    ) -> ModerationSession:
        present = set(moderator_ids)
        if len(present) < MIN_QUORUM:
            raise QuorumError(f"a session requires at least {MIN_QUORUM} moderators")
        roster = set(self._roster_ids())
        unknown = present - roster
        if unknown:
            raise ValidationError(f"not on the moderator roster: {sorted(unknown)}")
        with self._lock:
            for session in self._sessions.values():
                if session.state == "open" and session.target_release == target_release:
                    raise SessionStateError(
                        "a session for this release is already open"
                    )
            session = ModerationSession(
                id=uuid.uuid4().hex,
                target_release=target_release,
                moderators_present=present,
                opened_at=self._clock.now(),
                worklist=tuple(self._store.pending_ids()),
            )
            self._sessions[session.id] = session
            return session

    def session(self, session_id: str) -> ModerationSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise ValidationError(f"no such session: {session_id}") from None

    def open_sessions(self) -> list[ModerationSession]:
        with self._lock:
            return [s for s in self._sessions.values() if s.state == "open"]

    def is_clear(self, instant: datetime) -> bool:
        """True when no open session targets the given release instant."""
        with self._lock:
            return not any(
                s.state == "open" and s.target_release == instant
                for s in self._sessions.values()
            )

    def worklist(self, session_id: str) -> list[dict]:
        """Undecided messages with their bodies, for the moderator console."""
        with self._lock:
            session = self.session(session_id)
            held = session.held_ids()
            out = []
            for mid in session.undecided():
                message = self._store.message(mid)
                out.append(
                    {
                        "id": message.id,
                        "kind": message.kind,
                        "category": message.category,
                        "parent_post": message.parent_post,
                        "title": message.title,
                        "body": message.body,
                        "pseudonym": message.author,
                        "held": mid in held,
                    }
                )
            return out

    # -- deciding ---------------------------------------------------------------

    def record_decision(
        self,
        session_id: str,
        message_id: str,
        votes: Mapping[str, str],
        challenge_kind: str = KIND_NONE,
        final_body: Optional[str] = None,
        reason: Optional[str] = None,
        rationale: Optional[str] = None,
    ) -> Decision:
        with self._lock:
            session = self.session(session_id)
            if session.state != "open":
                raise SessionStateError("session is closed")
            if message_id not in session.worklist:
                raise ValidationError("message is not in this session's worklist")
            if message_id in session.final_decisions():
                raise ValidationError("message already decided in this session")
            voters = set(votes)
            absent = voters - session.moderators_present
            if absent:
                raise ValidationError(f"votes from absent moderators: {sorted(absent)}")
            previously_held = message_id in session.held_ids()
            outcome = resolve(votes, challenge_kind, previously_held)
            if outcome == PUBLISH_EDITED:
                if final_body is None:
                    raise ValidationError("an approved edit needs the final body")
                if reason not in EDIT_REASONS:
                    raise ValidationError(
                        f"edit reason must be one of {', '.join(EDIT_REASONS)}"
                    )
            elif outcome == REJECT_CIVILITY:
                reason = KIND_CIVILITY
            elif outcome == REJECT_ANONYMITY:
                reason = KIND_ANONYMITY
            if outcome != PUBLISH_AS_IS and not (rationale and rationale.strip()):
                raise ValidationError("this outcome requires a rationale")
            decision = Decision(
                message_id=message_id,
                outcome=outcome,
                votes=dict(votes),
                challenge_kind=challenge_kind,
                reason=reason if outcome != PUBLISH_AS_IS else None,
                rationale=rationale,
                decided_at=self._clock.now(),
            )
            if outcome == PUBLISH_AS_IS:
                self._store.mark_approved(message_id)
            elif outcome == PUBLISH_EDITED:
                self._store.mark_approved(message_id, final_body=final_body)
            elif outcome in (REJECT_CIVILITY, REJECT_ANONYMITY):
                self._store.mark_rejected(message_id)
            session.decisions.append(decision)
            return decision

    # -- closing ------------------------------------------------------------------

    def close_session(self, session_id: str) -> SessionSummary:
        with self._lock:
            session = self.session(session_id)
            if session.state != "open":
                raise SessionStateError("session is closed")
            undecided = session.undecided()
            if undecided:
                raise SessionStateError(
                    f"{len(undecided)} worklist messages are still undecided"
                )
            summary = self._summarize(session)
            body = self._render_summary(summary)
            post = self._store.insert_summary_post(body)
            summary = SessionSummary(
                **{**summary.__dict__, "summary_post_id": post.id}
            )
            session.summary = summary
            session.state = "closed"
            return summary

    def _summarize(self, session: ModerationSession) -> SessionSummary:
        finals = list(session.final_decisions().values())
        modified = [d for d in finals if d.outcome == PUBLISH_EDITED]
        rejected = [d for d in finals if d.outcome in (REJECT_CIVILITY, REJECT_ANONYMITY)]
        published = [d for d in finals if d.outcome in (PUBLISH_AS_IS, PUBLISH_EDITED)]
        modified_reasons: dict[str, int] = {}
        for d in modified:
            modified_reasons[d.reason] = modified_reasons.get(d.reason, 0) + 1
        rejected_reasons: dict[str, int] = {}
        for d in rejected:
            rejected_reasons[d.reason] = rejected_reasons.get(d.reason, 0) + 1
        return SessionSummary(
            session_id=session.id,
            target_release=session.target_release,
            top_posts=tuple(self._top_posts()),
            published_count=len(published),
            modified_count=len(modified),
            modified_reasons=modified_reasons,
            rejected_count=len(rejected),
            rejected_reasons=rejected_reasons,
        )

    def _top_posts(self, limit: int = 3) -> list[dict]:
        """Most popular published posts: net votes, then comment count, then
        earliest publish."""
        posts = self._store.browse(sort="newest")
        ranked = sorted(
            posts,
            key=lambda p: (
                -self._store.net_votes(p.id),
                -self._store.comment_count(p.id),
                p.released_at,
                p.id,
            ),
        )
        return [
            {
                "post_id": p.id,
                "title": p.title or f"Post {p.id[:8]}",
                "net_votes": self._store.net_votes(p.id),
                "comments": self._store.comment_count(p.id),
            }
            for p in ranked[:limit]
        ]

    @staticmethod
    def _render_summary(summary: SessionSummary) -> str:
        lines = ["Moderation session summary", ""]
        if summary.top_posts:
            lines.append("Most popular posts:")
            for i, top in enumerate(summary.top_posts, start=1):
                lines.append(
                    f"{i}. {top['title']} "
                    f"(net votes {top['net_votes']}, comments {top['comments']})"
                )
        else:
            lines.append("Most popular posts: none published yet")
        lines.append("")
        lines.append(f"Messages published: {summary.published_count}")
        lines.append(
            f"Messages modified: {summary.modified_count}"
            + _histogram_suffix(summary.modified_reasons)
        )
        lines.append(
            f"Messages rejected: {summary.rejected_count}"
            + _histogram_suffix(summary.rejected_reasons)
        )
        return "\n".join(lines)

    # -- audit ---------------------------------------------------------------------

    def decision_records(self) -> list[dict]:
        """Line-oriented audit records. Votes appear as counts, never
        attributed to moderators; rejected bodies are long gone by now."""
        with self._lock:
            out = []
            for session in sorted(self._sessions.values(), key=lambda s: s.opened_at):
                for d in session.decisions:
                    approvals = sum(1 for v in d.votes.values() if v == VOTE_APPROVE)
                    out.append(
                        {
                            "session_id": session.id,
                            "target_release": session.target_release.isoformat(),
                            "message_id": d.message_id,
                            "outcome": d.outcome,
                            "challenge_kind": d.challenge_kind,
                            "reason": d.reason,
                            "rationale": d.rationale,
                            "approve_count": approvals,
                            "challenge_count": len(d.votes) - approvals,
                            "decided_at": d.decided_at.isoformat(),
                        }
                    )
            return out

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "sessions": [
                    {
                        "id": s.id,
                        "target_release": s.target_release.isoformat(),
                        "moderators_present": sorted(s.moderators_present),
                        "opened_at": s.opened_at.isoformat(),
                        "worklist": list(s.worklist),
                        "state": s.state,
                        "decisions": [
                            {
                                "message_id": d.message_id,
                                "outcome": d.outcome,
                                "votes": dict(d.votes),
                                "challenge_kind": d.challenge_kind,
                                "reason": d.reason,
                                "rationale": d.rationale,
                                "decided_at": d.decided_at.isoformat(),
                            }
                            for d in s.decisions
                        ],
                    }
                    for s in sorted(self._sessions.values(), key=lambda s: s.opened_at)
                ]
            }

    def restore(self, state: dict) -> None:
        with self._lock:
            self._sessions = {}
            for s in state.get("sessions", []):
                session = ModerationSession(
                    id=s["id"],
                    target_release=datetime.fromisoformat(s["target_release"]),
                    moderators_present=set(s["moderators_present"]),
                    opened_at=datetime.fromisoformat(s["opened_at"]),
                    worklist=tuple(s["worklist"]),
                    state=s["state"],
                    decisions=[
                        Decision(
                            message_id=d["message_id"],
                            outcome=d["outcome"],
                            votes=dict(d["votes"]),
                            challenge_kind=d["challenge_kind"],
                            reason=d["reason"],
                            rationale=d["rationale"],
                            decided_at=datetime.fromisoformat(d["decided_at"]),
                        )
                        for d in s.get("decisions", [])
                    ],
                )
                self._sessions[session.id] = session


def _histogram_suffix(reasons: dict[str, int]) -> str:
    if not reasons:
        return ""
    parts = ", ".join(f"{k}: {v}" for k, v in sorted(reasons.items()))
    return f" ({parts})"
