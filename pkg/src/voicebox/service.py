"""Wires the access gate, content store, moderation engine, and release
coordinator into one service object with an explicit persistence boundary.

Everything user-facing goes through the shaping helpers here, which emit
only fields safe to publish: no email addresses, no token values, no
rejected bodies, no per-moderator vote attribution. The event log records
submission, view, and vote activity for analytics; events referencing a
rejected message are pruned when the rejection lands, and exports only ever
mention published subjects.
"""

from __future__ import annotations

import json
import random
import threading
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .access_gate import (
    AccessGate,
    DEFAULT_SESSION_TTL,
    DEFAULT_TOKEN_TTL,
    Whitelist,
    WordLists,
    default_word_lists,
    load_word_lists,
)
from .clock import Clock, SystemClock
from .config import ModeratorRoster, ServiceConfig
from .content_store import (
    ContentStore,
    DEFAULT_CATEGORIES,
    KIND_COMMENT,
    KIND_POST,
    Message,
)
from .errors import ValidationError
from .mailer import Mailer, MemoryMailer, SmtpMailer
from .moderation_engine import (
    ModerationEngine,
    REJECT_ANONYMITY,
    REJECT_CIVILITY,
)
from .release_scheduler import (
    PublishBatch,
    ReleaseCoordinator,
    ReleaseSchedule,
)

SUBMIT_STATUS = "queued for the next moderation session"


class ForumService:
    def __init__(
        self,
        *,
        whitelist: Whitelist,
        roster: ModeratorRoster,
        mailer: Mailer,
        clock: Optional[Clock] = None,
        wordlists: Optional[WordLists] = None,
        schedule: Optional[ReleaseSchedule] = None,
        categories: Iterable[str] = DEFAULT_CATEGORIES,
        login_url_template: str = "http://127.0.0.1:8080/redeem#{token}",
        token_ttl: timedelta = DEFAULT_TOKEN_TTL,
        session_ttl: timedelta = DEFAULT_SESSION_TTL,
        token_rng: Optional[random.Random] = None,
        name_rng: Optional[random.Random] = None,
        batch_rng: Optional[random.Random] = None,
        whitelist_path=None,
    ):
        self.clock = clock if clock is not None else SystemClock()
        self.whitelist = whitelist
        self._whitelist_path = whitelist_path
        self.roster = roster
        self.mailer = mailer
        self.gate = AccessGate(
            whitelist=whitelist,
            mailer=mailer,
            wordlists=wordlists if wordlists is not None else default_word_lists(),
            clock=self.clock,
            login_url_template=login_url_template,
            token_ttl=token_ttl,
            session_ttl=session_ttl,
            token_rng=token_rng,
            name_rng=name_rng,
        )
        self.store = ContentStore(self.clock, categories)
        self.engine = ModerationEngine(self.store, self.clock, roster.ids)
        self.coordinator = ReleaseCoordinator(
            schedule=schedule if schedule is not None else ReleaseSchedule(),
            clock=self.clock,
            collect=lambda: [m.id for m in self.store.approved_in_order()],
            apply=self._apply_batch,
            is_clear=self.engine.is_clear,
            rng=batch_rng,
        )
        self._events: list[dict] = []
        self._events_lock = threading.Lock()
        self._ticker: Optional[threading.Thread] = None
        self._ticker_stop = threading.Event()

    @classmethod
    def from_config(cls, config: ServiceConfig, clock: Optional[Clock] = None) -> "ForumService":
        whitelist = Whitelist()
        whitelist.load(config.whitelist_path)
        roster = ModeratorRoster()
        roster.load(config.roster_path)
        if config.adjectives_path and config.modifiers_path and config.nouns_path:
            wordlists = load_word_lists(
                config.adjectives_path, config.modifiers_path, config.nouns_path
            )
        else:
            wordlists = default_word_lists()
        if config.mail.backend == "smtp":
            mailer: Mailer = SmtpMailer(
                host=config.mail.host,
                port=config.mail.port,
                username=config.mail.username,
                password=config.mail.password,
                sender=config.mail.sender,
                use_tls=config.mail.use_tls,
            )
        else:
            mailer = MemoryMailer()
        service = cls(
            whitelist=whitelist,
            roster=roster,
            mailer=mailer,
            clock=clock,
            wordlists=wordlists,
            schedule=ReleaseSchedule(config.release_times, config.timezone),
            categories=config.categories or DEFAULT_CATEGORIES,
            login_url_template=config.login_url_template,
            token_ttl=config.token_ttl,
            session_ttl=config.session_ttl,
            whitelist_path=config.whitelist_path,
        )
        if config.state_path and Path(config.state_path).exists():
            service.load_state(config.state_path)
        return service

    # -- events -----------------------------------------------------------------

    def _record_event(self, kind: str, subject: str) -> None:
        with self._events_lock:
            self._events.append(
                {
                    "kind": kind,
                    "subject": subject,
                    "timestamp": self.clock.now().isoformat(),
                }
            )

    def _prune_events(self, subject: str) -> None:
        with self._events_lock:
            self._events = [e for e in self._events if e["subject"] != subject]

    # -- access ------------------------------------------------------------------

    def request_access(self, email: str) -> str:
        return self.gate.request_access(email)

    def redeem(self, token_value: str):
        return self.gate.redeem_token(token_value)

    def session_info(self, session_id: str) -> dict:
        session = self.gate.session(session_id)
        return {
            "session_id": session.id,
            "pseudonym": session.pseudonym.text,
            "expires_at": session.expires_at.isoformat(),
        }

    def register_alternate_address(self, session_id: str, address: str) -> None:
        self.gate.register_alternate_address(session_id, address)
        # eligibility lives in the whitelist file; keep it durable
        if self._whitelist_path is not None:
            self.whitelist.save(self._whitelist_path)

    # -- contributing --------------------------------------------------------------

    def submit_post(
        self, session_id: str, category: str, body: str, title: Optional[str] = None
    ) -> dict:
        session = self.gate.session(session_id)
        message = self.store.submit_message(session, KIND_POST, category, body, title)
        self._record_event("submission", message.id)
        return self._submission_receipt(message)

    def submit_comment(self, session_id: str, post_id: str, body: str) -> dict:
        session = self.gate.session(session_id)
        message = self.store.submit_message(session, KIND_COMMENT, post_id, body)
        self._record_event("submission", message.id)
        return self._submission_receipt(message)

    def _submission_receipt(self, message: Message) -> dict:
        return {
            "message_id": message.id,
            "status": SUBMIT_STATUS,
            "next_release": self.coordinator.next_release().isoformat(),
        }

    def cast_vote(self, session_id: str, post_id: str, direction: str) -> dict:
        session = self.gate.session(session_id)
        tally = self.store.cast_vote(session, post_id, direction)
        self._record_event("vote", post_id)
        return tally

    # -- reading -------------------------------------------------------------------

    def categories(self) -> list[dict]:
        return [
            {"name": c.name, "reserved": c.reserved} for c in self.store.categories()
        ]

    def browse(
        self,
        category: Optional[str] = None,
        query: Optional[str] = None,
        sort: str = "newest",
    ) -> list[dict]:
        return [self._post_record(m) for m in self.store.browse(category, query, sort)]

    def thread(self, post_id: str) -> dict:
        thread = self.store.get_thread(post_id)
        self._record_event("view", post_id)
        return {
            "post": self._post_record(thread.post),
            "comments": [self._comment_record(c) for c in thread.comments],
        }

    def _post_record(self, m: Message) -> dict:
        return {
            "id": m.id,
            "kind": m.kind,
            "category": m.category,
            "title": m.title,
            "body": m.body,
            "pseudonym": m.author,
            "publish_label": m.publish_label,
            "moderated_flag": m.moderated_flag,
            "net_votes": self.store.net_votes(m.id),
            "comment_count": self.store.comment_count(m.id),
        }

    def _comment_record(self, m: Message) -> dict:
        return {
            "id": m.id,
            "kind": m.kind,
            "parent": m.parent_post,
            "body": m.body,
            "pseudonym": m.author,
            "publish_label": m.publish_label,
            "moderated_flag": m.moderated_flag,
        }

    # -- moderating -----------------------------------------------------------------

    def open_moderation(
        self, moderator_ids: Iterable[str], target_release: datetime
    ) -> dict:
        session = self.engine.open_session(moderator_ids, target_release)
        return self._session_record(session)

    def moderation_sessions(self) -> list[dict]:
        return [self._session_record(s) for s in self.engine.open_sessions()]

    def moderation_worklist(self, session_id: str) -> list[dict]:
        return self.engine.worklist(session_id)

    def record_decision(
        self,
        session_id: str,
        message_id: str,
        votes: Mapping[str, str],
        challenge_kind: str = "none",
        final_body: Optional[str] = None,
        reason: Optional[str] = None,
        rationale: Optional[str] = None,
    ) -> dict:
        decision = self.engine.record_decision(
            session_id,
            message_id,
            votes,
            challenge_kind,
            final_body=final_body,
            reason=reason,
            rationale=rationale,
        )
        if decision.outcome in (REJECT_CIVILITY, REJECT_ANONYMITY):
            self._prune_events(message_id)
        approvals = sum(1 for v in decision.votes.values() if v == "approve")
        return {
            "message_id": decision.message_id,
            "outcome": decision.outcome,
            "approve_count": approvals,
            "challenge_count": len(decision.votes) - approvals,
        }

    def close_moderation(self, session_id: str) -> dict:
        summary = self.engine.close_session(session_id)
        return {
            "session_id": summary.session_id,
            "target_release": summary.target_release.isoformat(),
            "top_posts": list(summary.top_posts),
            "published_count": summary.published_count,
            "modified_count": summary.modified_count,
            "modified_reasons": dict(summary.modified_reasons),
            "rejected_count": summary.rejected_count,
            "rejected_reasons": dict(summary.rejected_reasons),
            "summary_post_id": summary.summary_post_id,
        }

    def _session_record(self, session) -> dict:
        return {
            "id": session.id,
            "target_release": session.target_release.isoformat(),
            "moderators_present": sorted(session.moderators_present),
            "state": session.state,
            "worklist_size": len(session.worklist),
            "undecided": len(session.undecided()),
        }

    # -- releasing ---------------------------------------------------------------------

    def poll(self) -> list[PublishBatch]:
        return self.coordinator.poll()

    def _apply_batch(self, batch: PublishBatch) -> None:
        self.store.apply_publish(batch.message_ids, batch.label, batch.released_at)

    def next_release(self) -> datetime:
        return self.coordinator.next_release()

    def batches(self) -> list[dict]:
        return [
            {
                "label": b.label,
                "released_at": b.released_at.isoformat(),
                "message_ids": list(b.message_ids),
            }
            for b in self.coordinator.batches
        ]

    def health(self) -> dict:
        return {
            "status": "ok",
            "schedule": self.coordinator.schedule.describe(),
            "next_release": self.next_release().isoformat(),
            "published_messages": self.store.published_count(),
        }

    # -- exports ------------------------------------------------------------------------

    def export_corpus(self) -> list[dict]:
        return self.store.export_records()

    def export_votes(self) -> list[dict]:
        return self.store.vote_records()

    def export_events(self) -> list[dict]:
        """Events whose subjects exist in the published corpus, in append order."""
        published = {r["id"] for r in self.store.export_records()}
        with self._events_lock:
            return [e for e in self._events if e["subject"] in published]

    def export_decisions(self) -> list[dict]:
        return self.engine.decision_records()

    # -- persistence -----------------------------------------------------------------------

    def dump_state(self) -> dict:
        with self._events_lock:
            events = [dict(e) for e in self._events]
        return {
            "whitelist": self.whitelist.entries(),
            "access": self.gate.snapshot(),
            "content": self.store.snapshot(),
            "moderation": self.engine.snapshot(),
            "release": self.coordinator.snapshot(),
            "events": events,
        }

    def restore_state(self, state: dict) -> None:
        self.gate.restore(state.get("access", {}))
        self.store.restore(state.get("content", {}))
        self.engine.restore(state.get("moderation", {}))
        self.coordinator.restore(state.get("release", {}))
        with self._events_lock:
            self._events = [dict(e) for e in state.get("events", [])]

    def save_state(self, path) -> None:
        payload = json.dumps(self.dump_state(), indent=2)
        Path(path).write_text(payload, encoding="utf-8")

    def load_state(self, path) -> None:
        self.restore_state(json.loads(Path(path).read_text(encoding="utf-8")))

    # -- background release ticker -------------------------------------------------------------

    def start_ticker(self, interval: float = 10.0, state_path=None) -> None:
        if self._ticker is not None:
            return
        self._ticker_stop.clear()

        def run():
            while not self._ticker_stop.wait(interval):
                try:
                    minted = self.poll()
                    if minted and state_path:
                        self.save_state(state_path)
                except Exception:
                    # the ticker must survive transient faults; the next tick retries
                    continue

        self._ticker = threading.Thread(target=run, name="release-ticker", daemon=True)
        self._ticker.start()

    def stop_ticker(self) -> None:
        if self._ticker is None:
            return
        self._ticker_stop.set()
        self._ticker.join(timeout=5)
        self._ticker = None
