"""Categorized posts, comments, and votes, gated by the moderation lifecycle.

Visibility rule: browse, search, threads, and exports only ever see messages
in state "published". Pending bodies are reachable solely through the
moderation engine's worklist; rejected bodies are erased and reachable by
nobody.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional

from .access_gate import Session
from .clock import Clock
from .errors import AuthorizationError, ServiceError, ValidationError

KIND_POST = "post"
KIND_COMMENT = "comment"

STATE_PENDING = "pending"
STATE_APPROVED = "approved"
STATE_PUBLISHED = "published"
STATE_REJECTED = "rejected_erased"

VOTE_UP = "up"
VOTE_DOWN = "down"

MODERATORS_CATEGORY = "Moderators"
MAX_BODY_LENGTH = 10_000

DEFAULT_CATEGORIES = (
    "General",
    "Facilities",
    "Pay and Conditions",
    "Wellbeing",
)

# Uniform "not here" error: unknown targets and invisible (pending/rejected)
# targets must be indistinguishable, or the store becomes an existence oracle.
NOT_FOUND_DETAIL = "no such published post"


class UnknownTargetError(ServiceError):
    def __init__(self, detail: str = NOT_FOUND_DETAIL):
        super().__init__(detail)


class ReservedCategoryError(ServiceError):
    pass


@dataclass(frozen=True)
class Category:
    name: str
    reserved: bool = False


@dataclass
class Message:
    id: str
    kind: str
    body: str
    author: str
    submitted_at: datetime
    submission_seq: int
    category: Optional[str] = None      # posts only
    parent_post: Optional[str] = None   # comments only
    title: Optional[str] = None         # posts only, optional
    state: str = STATE_PENDING
    moderated_flag: bool = False
    publish_label: Optional[str] = None
    released_at: Optional[datetime] = None
    approved_seq: Optional[int] = None


@dataclass
class VoteTally:
    """Internal tally. The voters map is never exposed outside the store."""

    post_id: str
    voters: dict[str, str] = field(default_factory=dict)

    @property
    def up(self) -> int:
        return sum(1 for d in self.voters.values() if d == VOTE_UP)

    @property
    def down(self) -> int:
        return sum(1 for d in self.voters.values() if d == VOTE_DOWN)

    @property
    def net(self) -> int:
        return self.up - self.down

    def public(self) -> dict:
        return {"post_id": self.post_id, "up": self.up, "down": self.down, "net": self.net}


@dataclass(frozen=True)
class Thread:
    post: Message
    comments: tuple[Message, ...]


class ContentStore:
    def __init__(self, clock: Clock, categories: Iterable[str] = DEFAULT_CATEGORIES):
        self._clock = clock
        self._categories: dict[str, Category] = {}
        for name in categories:
            self.add_category(name)
        self._categories[MODERATORS_CATEGORY] = Category(MODERATORS_CATEGORY, reserved=True)
        self._messages: dict[str, Message] = {}
        self._tallies: dict[str, VoteTally] = {}
        self._lock = threading.RLock()
        self._submission_seq = 0
        self._approved_seq = 0

    # -- categories ----------------------------------------------------------

    def add_category(self, name: str) -> None:
        name = name.strip()
        if not name:
            raise ValidationError("empty category name")
        if name in self._categories:
            raise ValidationError(f"duplicate category: {name}")
        self._categories[name] = Category(name)

    def categories(self) -> list[Category]:
        return sorted(self._categories.values(), key=lambda c: c.name)

    def category(self, name: str) -> Category:
        try:
            return self._categories[name]
        except KeyError:
            raise ValidationError(f"unknown category: {name}") from None

    # -- submission ----------------------------------------------------------

    def submit_message(
        self,
        session: Session,
        kind: str,
        target: str,
        body: str,
        title: Optional[str] = None,
    ) -> Message:
        """Store a pending message under the session's pseudonym.

        Posts target an existing non-reserved category; comments target a
        published post. Pending messages are invisible to every browsing
        operation until a moderation session publishes them.
        """
        if session.expires_at <= self._clock.now():
            raise AuthorizationError("authorization required")
        if kind not in (KIND_POST, KIND_COMMENT):
            raise ValidationError(f"unknown message kind: {kind}")
        if not body or not body.strip():
            raise ValidationError("message body is empty")
        if len(body) > MAX_BODY_LENGTH:
            raise ValidationError(f"message body exceeds {MAX_BODY_LENGTH} characters")
        with self._lock:
            if kind == KIND_POST:
                category = self.category(target)
                if category.reserved:
                    raise ReservedCategoryError(
                        f"category {target} accepts no direct submissions"
                    )
                message = self._new_message(
                    kind, body, session.pseudonym.text, category=target, title=title
                )
            else:
                parent = self._messages.get(target)
                if parent is None or parent.kind != KIND_POST or parent.state != STATE_PUBLISHED:
                    raise UnknownTargetError()
                message = self._new_message(
                    kind, body, session.pseudonym.text, parent_post=target
                )
            self._messages[message.id] = message
            return message

    def _new_message(self, kind: str, body: str, author: str, **fields_) -> Message:
        self._submission_seq += 1
        return Message(
            id=uuid.uuid4().hex,
            kind=kind,
            body=body,
            author=author,
            submitted_at=self._clock.now(),
            submission_seq=self._submission_seq,
            **fields_,
        )

    def insert_summary_post(self, body: str, author: str = "moderators") -> Message:
        """Create a pre-approved post in the reserved Moderators category.

        Only the moderation engine calls this; it is the single path into the
        reserved category.
        """
        with self._lock:
            message = self._new_message(
                KIND_POST, body, author, category=MODERATORS_CATEGORY
            )
            message.state = STATE_APPROVED
            self._approved_seq += 1
            message.approved_seq = self._approved_seq
            self._messages[message.id] = message
            return message

    # -- voting ---------------------------------------------------------------

    def cast_vote(self, session: Session, post_id: str, direction: str) -> dict:
        """Record or replace the session's vote on a published post.

        A session holds at most one vote per post; voting again replaces the
        previous direction rather than stacking.
        """
        if session.expires_at <= self._clock.now():
            raise AuthorizationError("authorization required")
        if direction not in (VOTE_UP, VOTE_DOWN):
            raise ValidationError(f"unknown vote direction: {direction}")
        with self._lock:
            post = self._messages.get(post_id)
            if post is None or post.kind != KIND_POST or post.state != STATE_PUBLISHED:
                raise UnknownTargetError()
            tally = self._tallies.setdefault(post_id, VoteTally(post_id))
            tally.voters[session.id] = direction
            return tally.public()

    def tally(self, post_id: str) -> dict:
        with self._lock:
            tally = self._tallies.get(post_id)
            if tally is None:
                return {"post_id": post_id, "up": 0, "down": 0, "net": 0}
            return tally.public()

    def net_votes(self, post_id: str) -> int:
        return self.tally(post_id)["net"]

    # -- browsing -------------------------------------------------------------

    def browse(
        self,
        category: Optional[str] = None,
        query: Optional[str] = None,
        sort: str = "newest",
    ) -> list[Message]:
        """Published posts matching every supplied facet.

        The text query is a case-insensitive substring match over title and
        body. Sorts: "newest" puts the most recent publish batch first;
        "votes" orders by net tally. Ties resolve by publish batch (newest
        first) then id, so ordering is stable.
        """
        if sort not in ("newest", "votes"):
            raise ValidationError(f"unknown sort: {sort}")
        if category is not None:
            self.category(category)  # unknown category is an error
        needle = query.lower() if query else None
        with self._lock:
            posts = [
                m
                for m in self._messages.values()
                if m.kind == KIND_POST and m.state == STATE_PUBLISHED
            ]
        if category is not None:
            posts = [m for m in posts if m.category == category]
        if needle:
            posts = [
                m
                for m in posts
                if needle in m.body.lower() or (m.title and needle in m.title.lower())
            ]
        def batch_key(m: Message):
            return (-m.released_at.timestamp(), m.id)
        if sort == "votes":
            posts.sort(key=lambda m: (-self.net_votes(m.id),) + batch_key(m))
        else:
            posts.sort(key=batch_key)
        return posts

    def get_thread(self, post_id: str) -> Thread:
        """The published post plus its published comments.

        Comments are ordered by publish batch, then submission order within
        the batch, so replies follow what they reference.
        """
        with self._lock:
            post = self._messages.get(post_id)
            if post is None or post.kind != KIND_POST or post.state != STATE_PUBLISHED:
                raise UnknownTargetError()
            comments = [
                m
                for m in self._messages.values()
                if m.kind == KIND_COMMENT
                and m.parent_post == post_id
                and m.state == STATE_PUBLISHED
            ]
        comments.sort(key=lambda m: (m.released_at, m.submission_seq))
        return Thread(post=post, comments=tuple(comments))

    def comment_count(self, post_id: str) -> int:
        with self._lock:
            return sum(
                1
                for m in self._messages.values()
                if m.kind == KIND_COMMENT
                and m.parent_post == post_id
                and m.state == STATE_PUBLISHED
            )

    # -- moderation-side mutations ---------------------------------------------

    def message(self, message_id: str) -> Message:
        """Raw fetch, any state. For the moderation engine and tests only."""
        try:
            return self._messages[message_id]
        except KeyError:
            raise UnknownTargetError("no such message") from None

    def pending_ids(self) -> list[str]:
        """Ids of pending messages in submission order."""
        with self._lock:
            pending = [
                m for m in self._messages.values() if m.state == STATE_PENDING
            ]
        pending.sort(key=lambda m: m.submission_seq)
        return [m.id for m in pending]

    def mark_approved(self, message_id: str, final_body: Optional[str] = None) -> Message:
        """Move pending -> approved, applying a moderation edit if given."""
        with self._lock:
            message = self.message(message_id)
            if message.state != STATE_PENDING:
                raise ValidationError(f"message is not pending: {message_id}")
            if final_body is not None:
                if not final_body.strip():
                    raise ValidationError("edited body is empty")
                if len(final_body) > MAX_BODY_LENGTH:
                    raise ValidationError("edited body too long")
                if final_body == message.body:
                    raise ValidationError("edited body is identical to the submission")
                message.body = final_body
                message.moderated_flag = True
            message.state = STATE_APPROVED
            self._approved_seq += 1
            message.approved_seq = self._approved_seq
            return message

    def mark_rejected(self, message_id: str) -> Message:
        """Move pending -> rejected and erase the content immediately.

        Nothing of the original body (or title) survives anywhere in the
        store after this returns.
        """
        with self._lock:
            message = self.message(message_id)
            if message.state != STATE_PENDING:
                raise ValidationError(f"message is not pending: {message_id}")
            message.body = ""
            message.title = None
            message.state = STATE_REJECTED
            return message

    def approved_in_order(self) -> list[Message]:
        """Approved messages in approval order, ready for release."""
        with self._lock:
            approved = [
                m for m in self._messages.values() if m.state == STATE_APPROVED
            ]
        approved.sort(key=lambda m: m.approved_seq)
        return approved

    def apply_publish(self, message_ids: Iterable[str], label: str, released_at: datetime) -> None:
        """Flip approved -> published atomically and stamp the batch label."""
        with self._lock:
            messages = [self.message(mid) for mid in message_ids]
            for message in messages:
                if message.state != STATE_APPROVED:
                    raise ValidationError(f"message is not approved: {message.id}")
            for message in messages:
                message.state = STATE_PUBLISHED
                message.publish_label = label
                message.released_at = released_at

    # -- export and persistence -------------------------------------------------

    def published_count(self) -> int:
        with self._lock:
            return sum(1 for m in self._messages.values() if m.state == STATE_PUBLISHED)

    def export_records(self) -> list[dict]:
        """Published corpus as archival records, posts and comments alike."""
        with self._lock:
            published = [
                m for m in self._messages.values() if m.state == STATE_PUBLISHED
            ]
        published.sort(key=lambda m: (m.released_at, m.submission_seq))
        return [
            {
                "id": m.id,
                "kind": m.kind,
                "parent": m.parent_post,
                "category": m.category,
                "pseudonym": m.author,
                "publish_label": m.publish_label,
                "moderated_flag": m.moderated_flag,
                "body": m.body,
            }
            for m in published
        ]

    def vote_records(self) -> list[dict]:
        with self._lock:
            tallies = sorted(self._tallies.values(), key=lambda t: t.post_id)
            return [t.public() for t in tallies]

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "categories": [
                    {"name": c.name, "reserved": c.reserved} for c in self.categories()
                ],
                "messages": [
                    {
                        "id": m.id,
                        "kind": m.kind,
                        "parent_post": m.parent_post,
                        "category": m.category,
                        "title": m.title,
                        "body": m.body,
                        "author": m.author,
                        "submitted_at": m.submitted_at.isoformat(),
                        "submission_seq": m.submission_seq,
                        "state": m.state,
                        "moderated_flag": m.moderated_flag,
                        "publish_label": m.publish_label,
                        "released_at": m.released_at.isoformat() if m.released_at else None,
                        "approved_seq": m.approved_seq,
                    }
                    for m in sorted(self._messages.values(), key=lambda m: m.submission_seq)
                ],
                "tallies": [
                    {"post_id": t.post_id, "voters": dict(t.voters)}
                    for t in sorted(self._tallies.values(), key=lambda t: t.post_id)
                ],
                "counters": {
                    "submission_seq": self._submission_seq,
                    "approved_seq": self._approved_seq,
                },
            }

    def restore(self, state: dict) -> None:
        with self._lock:
            self._categories = {}
            for c in state.get("categories", []):
                self._categories[c["name"]] = Category(c["name"], c["reserved"])
            self._messages = {}
            for m in state.get("messages", []):
                self._messages[m["id"]] = Message(
                    id=m["id"],
                    kind=m["kind"],
                    body=m["body"],
                    author=m["author"],
                    submitted_at=datetime.fromisoformat(m["submitted_at"]),
                    submission_seq=m["submission_seq"],
                    category=m["category"],
                    parent_post=m["parent_post"],
                    title=m["title"],
                    state=m["state"],
                    moderated_flag=m["moderated_flag"],
                    publish_label=m["publish_label"],
                    released_at=datetime.fromisoformat(m["released_at"])
                    if m["released_at"]
                    else None,
                    approved_seq=m["approved_seq"],
                )
            self._tallies = {
                t["post_id"]: VoteTally(t["post_id"], dict(t["voters"]))
                for t in state.get("tallies", [])
            }
            counters = state.get("counters", {})
            self._submission_seq = counters.get("submission_seq", len(self._messages))
            self._approved_seq = counters.get("approved_seq", 0)
