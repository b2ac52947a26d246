"""Whitelist-gated issuance of one-time unlinkable login tokens.

The anonymity contract of this module:

* A token's value is drawn from an injected RNG and is never a function of
  the requesting address. With a seeded RNG the value stream is identical
  whatever addresses are supplied.
* Tokens are persisted as SHA-256 digests only; the raw value exists in the
  mailed link and nowhere else. A leaked store cannot be redeemed.
* No token record, session record, or anything else this module stores
  references an email address. Addresses live in the whitelist and in the
  single Mailer.send call, after which they are discarded.
* Acknowledgements to access requests are byte-identical whether or not the
  address was whitelisted, so the endpoint cannot be used to enumerate
  membership.
"""

from __future__ import annotations

import base64
import hashlib
import itertools
import random
import re
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional

from .clock import Clock
from .errors import AuthorizationError, DeliveryError, ServiceError, ValidationError
from .mailer import Mailer

# One fixed acknowledgement for every access request, hit or miss.
ACCESS_RECEIPT = "If the address is eligible, a login link is on its way."

# Uniform rejection: unknown, already-redeemed, and expired tokens are
# deliberately indistinguishable.
TOKEN_REJECTED_DETAIL = "login link is invalid or has expired"

TOKEN_STATE_UNUSED = "unused"
TOKEN_STATE_REDEEMED = "redeemed"
TOKEN_STATE_EXPIRED = "expired"

DEFAULT_TOKEN_TTL = timedelta(hours=24)
DEFAULT_SESSION_TTL = timedelta(hours=12)

MAIL_SUBJECT = "Your login link"
MAIL_BODY_TEMPLATE = (
    "Hello,\n\n"
    "Here is your one-time login link:\n\n"
    "    {login_url}\n\n"
    "The link works once and expires after {ttl_hours} hours. It is not tied "
    "to this address in any way; nobody can tell who used it.\n"
)

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")
_DOMAIN_RE = re.compile(r"^[^@\s]+\.[^@\s]+$")


class TokenRejected(AuthorizationError):
    """Raised for any unredeemable token, with one uniform message."""

    def __init__(self):
        super().__init__(TOKEN_REJECTED_DETAIL)


class PseudonymSpaceExhausted(ServiceError):
    """Every word combination is currently held by a live session."""


def validate_email(address: str) -> str:
    """Return the normalized (lowercased) address or raise ValidationError."""
    address = address.strip().lower()
    if not _EMAIL_RE.match(address):
        raise ValidationError("malformed email address")
    return address


class Whitelist:
    """Set of eligible addresses and domain patterns.

    Entries are normalized lowercase. A line beginning with "@" is a domain
    pattern and matches any address whose domain part equals the pattern's
    domain exactly. Whitelist entries reference no token, session, or message.
    """

    def __init__(self, entries: Iterable[str] = ()):
        self._entries: set[str] = set()
        for entry in entries:
            self.add(entry)

    @staticmethod
    def normalize(entry: str) -> str:
        entry = entry.strip().lower()
        if not entry:
            raise ValidationError("empty whitelist entry")
        if entry.startswith("@"):
            if not _DOMAIN_RE.match(entry[1:]):
                raise ValidationError(f"bad domain pattern: {entry!r}")
        elif not _EMAIL_RE.match(entry):
            raise ValidationError(f"bad whitelist entry: {entry!r}")
        return entry

    def add(self, entry: str) -> None:
        self._entries.add(self.normalize(entry))

    def remove(self, entry: str) -> None:
        self._entries.discard(self.normalize(entry))

    def matches(self, email: str) -> bool:
        email = email.strip().lower()
        if email in self._entries:
            return True
        domain = email.rsplit("@", 1)[-1]
        return f"@{domain}" in self._entries

    def entries(self) -> list[str]:
        return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, entry: str) -> bool:
        return self.normalize(entry) in self._entries

    def load(self, path: str | Path) -> None:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        self._entries = set()
        for line in lines:
            if line.strip():
                self.add(line)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            "".join(f"{entry}\n" for entry in self.entries()), encoding="utf-8"
        )


@dataclass(frozen=True)
class Pseudonym:
    """Three-word ludic identity, e.g. "complex chestnut sheep"."""

    words: tuple[str, str, str]

    def __post_init__(self):
        if len(self.words) != 3:
            raise ValidationError("pseudonym needs exactly three words")

    @property
    def text(self) -> str:
        return " ".join(self.words)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class WordLists:
    """Adjective, modifier, and noun pools for pseudonym minting."""

    adjectives: tuple[str, ...]
    modifiers: tuple[str, ...]
    nouns: tuple[str, ...]

    def __post_init__(self):
        for name in ("adjectives", "modifiers", "nouns"):
            if not getattr(self, name):
                raise ValidationError(f"word list {name} is empty")

    @property
    def lists(self) -> tuple[tuple[str, ...], ...]:
        return (self.adjectives, self.modifiers, self.nouns)

    @property
    def capacity(self) -> int:
        return len(self.adjectives) * len(self.modifiers) * len(self.nouns)


def _read_words(path: str | Path) -> tuple[str, ...]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word:
            words.append(word)
    return tuple(words)


def load_word_lists(adjectives: str | Path, modifiers: str | Path, nouns: str | Path) -> WordLists:
    return WordLists(_read_words(adjectives), _read_words(modifiers), _read_words(nouns))


def default_word_lists() -> WordLists:
    here = Path(__file__).parent / "words"
    return load_word_lists(
        here / "adjectives.txt", here / "modifiers.txt", here / "nouns.txt"
    )


def mint_pseudonym(
    rng: random.Random,
    wordlists: WordLists,
    live: frozenset[str] | set[str] = frozenset(),
    max_attempts: int = 100,
) -> Pseudonym:
    """Draw one word uniformly from each list, avoiding live pseudonyms.

    Collisions are regenerated up to max_attempts times; after that the full
    combination space is enumerated so a free name is still found whenever one
    exists. Raises PseudonymSpaceExhausted when every combination is live.
    """
    lists = wordlists.lists
    for _ in range(max_attempts):
        words = tuple(words_[rng.randrange(len(words_))] for words_ in lists)
        candidate = Pseudonym(words)
        if candidate.text not in live:
            return candidate
    free = [
        combo
        for combo in itertools.product(*lists)
        if " ".join(combo) not in live
    ]
    if not free:
        raise PseudonymSpaceExhausted("all pseudonym combinations are in use")
    return Pseudonym(free[rng.randrange(len(free))])


@dataclass
class TokenRecord:
    """Persisted form of an access token. Holds a digest, never the value."""

    digest: str
    issued_at: datetime
    expires_at: datetime
    state: str = TOKEN_STATE_UNUSED


@dataclass
class Session:
    """Pseudonymous identity created by redeeming a token.

    Carries no reference to any email address or token value; the id is
    freshly random and the pseudonym comes from the word lists.
    """

    id: str
    pseudonym: Pseudonym
    created_at: datetime
    expires_at: datetime


def _token_digest(value: str) -> str:
    return hashlib.sha256(value.encode("utf-8")).hexdigest()


def _encode_token(bits: int) -> str:
    raw = bits.to_bytes(16, "big")
    return base64.urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


class AccessGate:
    """Issues, redeems, and expires one-time login tokens.

    Redemption is an atomic compare-and-transition: under arbitrary
    concurrency each token produces at most one session.
    """

    def __init__(
        self,
        whitelist: Whitelist,
        mailer: Mailer,
        wordlists: WordLists,
        clock: Clock,
        *,
        login_url_template: str = "http://127.0.0.1:8080/redeem#{token}",
        token_ttl: timedelta = DEFAULT_TOKEN_TTL,
        session_ttl: timedelta = DEFAULT_SESSION_TTL,
        token_rng: Optional[random.Random] = None,
        name_rng: Optional[random.Random] = None,
    ):
        self.whitelist = whitelist
        self._mailer = mailer
        self._wordlists = wordlists
        self._clock = clock
        self._login_url_template = login_url_template
        self._token_ttl = token_ttl
        self._session_ttl = session_ttl
        # SystemRandom draws from the OS entropy pool; tests inject seeded RNGs.
        self._token_rng = token_rng or random.SystemRandom()
        self._name_rng = name_rng or random.SystemRandom()
        self._tokens: dict[str, TokenRecord] = {}
        self._sessions: dict[str, Session] = {}
        self._token_lock = threading.Lock()
        self._session_lock = threading.Lock()

    # -- issuing -----------------------------------------------------------

    def request_access(self, email: str) -> str:
        """Mail a one-time login link if the address is whitelisted.

        Returns the same acknowledgement string either way. The address is
        used for the whitelist check and the mailer call, then dropped.
        """
        email = validate_email(email)
        if self.whitelist.matches(email):
            now = self._clock.now()
            value = _encode_token(self._token_rng.getrandbits(128))
            record = TokenRecord(
                digest=_token_digest(value),
                issued_at=now,
                expires_at=now + self._token_ttl,
            )
            with self._token_lock:
                self._tokens[record.digest] = record
            login_url = self._login_url_template.format(token=value)
            body = MAIL_BODY_TEMPLATE.format(
                login_url=login_url,
                ttl_hours=int(self._token_ttl.total_seconds() // 3600),
            )
            try:
                self._mailer.send(email, MAIL_SUBJECT, body)
            except Exception as exc:
                with self._token_lock:
                    self._tokens.pop(record.digest, None)
                raise DeliveryError("could not deliver login link") from exc
        return ACCESS_RECEIPT

    # -- redemption --------------------------------------------------------

    def redeem_token(self, token_value: str) -> Session:
        """Atomically redeem a token into a fresh pseudonymous session."""
        digest = _token_digest(token_value)
        now = self._clock.now()
        with self._token_lock:
            record = self._tokens.get(digest)
            if record is None or record.state != TOKEN_STATE_UNUSED:
                raise TokenRejected()
            if record.expires_at <= now:
                record.state = TOKEN_STATE_EXPIRED
                raise TokenRejected()
            record.state = TOKEN_STATE_REDEEMED
        with self._session_lock:
            pseudonym = mint_pseudonym(
                self._name_rng, self._wordlists, self._live_pseudonyms(now)
            )
            session = Session(
                id=uuid.uuid4().hex,
                pseudonym=pseudonym,
                created_at=now,
                expires_at=now + self._session_ttl,
            )
            self._sessions[session.id] = session
        return session

    def session(self, session_id: str) -> Session:
        """Return the live session or raise AuthorizationError."""
        session = self._sessions.get(session_id)
        if session is None or session.expires_at <= self._clock.now():
            raise AuthorizationError("authorization required")
        return session

    def _live_pseudonyms(self, now: datetime) -> set[str]:
        return {
            s.pseudonym.text for s in self._sessions.values() if s.expires_at > now
        }

    # -- alternate addresses -----------------------------------------------

    def register_alternate_address(self, session_id: str, address: str) -> None:
        """Whitelist a private address for a caller holding a live session.

        Holding a session proves one prior legitimate access. The new entry
        joins the whitelist like any other; nothing links it to the session.
        """
        self.session(session_id)
        address = validate_email(address)
        self.whitelist.add(address)

    # -- introspection -----------------------------------------------------

    def unused_token_count(self) -> int:
        now = self._clock.now()
        with self._token_lock:
            return sum(
                1
                for r in self._tokens.values()
                if r.state == TOKEN_STATE_UNUSED and r.expires_at > now
            )

    def snapshot(self) -> dict:
        """Persistable view of gate state. Contains digests, never values."""
        with self._token_lock:
            tokens = [
                {
                    "digest": r.digest,
                    "issued_at": r.issued_at.isoformat(),
                    "expires_at": r.expires_at.isoformat(),
                    "state": r.state,
                }
                for r in self._tokens.values()
            ]
        with self._session_lock:
            sessions = [
                {
                    "id": s.id,
                    "pseudonym": s.pseudonym.text,
                    "created_at": s.created_at.isoformat(),
                    "expires_at": s.expires_at.isoformat(),
                }
                for s in self._sessions.values()
            ]
        return {"tokens": tokens, "sessions": sessions}

    def restore(self, state: dict) -> None:
        with self._token_lock:
            self._tokens = {
                t["digest"]: TokenRecord(
                    digest=t["digest"],
                    issued_at=datetime.fromisoformat(t["issued_at"]),
                    expires_at=datetime.fromisoformat(t["expires_at"]),
                    state=t["state"],
                )
                for t in state.get("tokens", [])
            }
        with self._session_lock:
            self._sessions = {
                s["id"]: Session(
                    id=s["id"],
                    pseudonym=Pseudonym(tuple(s["pseudonym"].split(" "))),
                    created_at=datetime.fromisoformat(s["created_at"]),
                    expires_at=datetime.fromisoformat(s["expires_at"]),
                )
                for s in state.get("sessions", [])
            }
