"""Configuration file handling and the moderator roster.

Config lives in one INI file. Everything it references (whitelist, roster,
word lists) must exist and parse at startup; a broken config fails fast
rather than limping into partial service. The listen address and mail
credentials can be overridden from the environment so secrets stay out of
the file.
"""

from __future__ import annotations

import configparser
import hashlib
import hmac
import os
from dataclasses import dataclass, field
from datetime import time, timedelta
from pathlib import Path
from typing import Optional
from zoneinfo import ZoneInfo

from .errors import ValidationError

MIN_ROSTER = 3

ENV_LISTEN = "VOICEBOX_LISTEN"
ENV_MAIL_USERNAME = "VOICEBOX_MAIL_USERNAME"
ENV_MAIL_PASSWORD = "VOICEBOX_MAIL_PASSWORD"
ENV_CONFIG = "VOICEBOX_CONFIG"

DEFAULT_CONFIG_PATH = "voicebox.ini"


class RosterError(ValidationError):
    pass


def _digest(secret: str) -> str:
    return hashlib.sha256(secret.encode("utf-8")).hexdigest()


class ModeratorRoster:
    """Moderator ids and their credential digests.

    The file stores one "id:sha256(secret)" pair per line, so the secrets
    themselves never touch disk. Removing below the three-member quorum
    floor is refused; a roster that cannot convene a session is useless.
    """

    def __init__(self):
        self._entries: dict[str, str] = {}

    def add(self, moderator_id: str, secret: str) -> None:
        moderator_id = moderator_id.strip()
        if not moderator_id or ":" in moderator_id or any(c.isspace() for c in moderator_id):
            raise RosterError(f"invalid moderator id: {moderator_id!r}")
        if moderator_id in self._entries:
            raise RosterError(f"moderator already enrolled: {moderator_id}")
        if not secret:
            raise RosterError("empty secret")
        self._entries[moderator_id] = _digest(secret)

    def remove(self, moderator_id: str) -> None:
        if moderator_id not in self._entries:
            raise RosterError(f"not on the roster: {moderator_id}")
        if len(self._entries) <= MIN_ROSTER:
            raise RosterError(
                f"removal refused: the roster must keep at least {MIN_ROSTER} moderators"
            )
        del self._entries[moderator_id]

    def ids(self) -> set[str]:
        return set(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def verify(self, moderator_id: str, secret: str) -> bool:
        stored = self._entries.get(moderator_id)
        if stored is None:
            # burn the same work as a real comparison
            hmac.compare_digest(_digest(secret), _digest(secret))
            return False
        return hmac.compare_digest(stored, _digest(secret))

    def load(self, path) -> None:
        entries: dict[str, str] = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise RosterError(f"{path}:{lineno}: expected id:digest")
            moderator_id, digest = line.split(":", 1)
            entries[moderator_id.strip()] = digest.strip()
        self._entries = entries

    def save(self, path) -> None:
        lines = [f"{mid}:{digest}" for mid, digest in sorted(self._entries.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class MailSettings:
    backend: str = "memory"  # memory | smtp
    host: str = "localhost"
    port: int = 25
    username: Optional[str] = None
    password: Optional[str] = None
    sender: str = "no-reply@localhost"
    use_tls: bool = False


@dataclass
class ServiceConfig:
    whitelist_path: Path
    roster_path: Path
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    adjectives_path: Optional[Path] = None
    modifiers_path: Optional[Path] = None
    nouns_path: Optional[Path] = None
    release_times: tuple[time, ...] = (time(9, 0), time(17, 0))
    timezone: str = "Europe/London"
    token_ttl: timedelta = timedelta(hours=24)
    session_ttl: timedelta = timedelta(hours=12)
    login_url_template: str = "http://127.0.0.1:8080/redeem#{token}"
    categories: tuple[str, ...] = ()
    state_path: Optional[Path] = None
    poll_interval: float = 10.0
    mail: MailSettings = field(default_factory=MailSettings)


def parse_release_times(raw: str) -> tuple[time, ...]:
    times = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            times.append(time.fromisoformat(chunk))
        except ValueError:
            raise ValidationError(f"bad release time {chunk!r}, expected HH:MM") from None
    if not times:
        raise ValidationError("at least one release time is required")
    if sorted(times) != times or len(set(times)) != len(times):
        raise ValidationError("release times must be strictly increasing")
    return tuple(times)


def load_config(path) -> ServiceConfig:
    """Parse and validate the INI config, applying environment overrides."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path, encoding="utf-8")
    base = path.parent

    def _path(section: str, key: str, required: bool = False) -> Optional[Path]:
        value = parser.get(section, key, fallback=None)
        if value is None:
            if required:
                raise ValidationError(f"config is missing [{section}] {key}")
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    whitelist_path = _path("access", "whitelist", required=True)
    roster_path = _path("moderation", "roster", required=True)
    config = ServiceConfig(whitelist_path=whitelist_path, roster_path=roster_path)

    listen = os.environ.get(ENV_LISTEN) or parser.get("service", "listen", fallback=None)
    if listen:
        host, sep, port = listen.rpartition(":")
        if not sep or not port.isdigit():
            raise ValidationError(f"bad listen address {listen!r}, expected host:port")
        config.listen_host, config.listen_port = host, int(port)
    state = _path("service", "state")
    if state:
        config.state_path = state
    config.poll_interval = parser.getfloat("service", "poll_interval", fallback=10.0)

    config.adjectives_path = _path("access", "adjectives")
    config.modifiers_path = _path("access", "modifiers")
    config.nouns_path = _path("access", "nouns")
    if parser.has_option("access", "token_ttl_hours"):
        config.token_ttl = timedelta(hours=parser.getfloat("access", "token_ttl_hours"))
    if parser.has_option("access", "session_ttl_hours"):
        config.session_ttl = timedelta(hours=parser.getfloat("access", "session_ttl_hours"))
    if parser.has_option("access", "login_url"):
        config.login_url_template = parser.get("access", "login_url")

    if parser.has_option("release", "times"):
        config.release_times = parse_release_times(parser.get("release", "times"))
    if parser.has_option("release", "timezone"):
        config.timezone = parser.get("release", "timezone")
        try:
            ZoneInfo(config.timezone)
        except Exception:
            raise ValidationError(f"unknown timezone: {config.timezone}") from None

    if parser.has_option("content", "categories"):
        config.categories = tuple(
            c.strip() for c in parser.get("content", "categories").split(",") if c.strip()
        )

    mail = MailSettings()
    if parser.has_section("mail"):
        mail.backend = parser.get("mail", "backend", fallback="memory")
        mail.host = parser.get("mail", "host", fallback="localhost")
        mail.port = parser.getint("mail", "port", fallback=25)
        mail.username = parser.get("mail", "username", fallback=None)
        mail.password = parser.get("mail", "password", fallback=None)
        mail.sender = parser.get("mail", "sender", fallback="no-reply@localhost")
        mail.use_tls = parser.getboolean("mail", "use_tls", fallback=False)
    if mail.backend not in ("memory", "smtp"):
        raise ValidationError(f"unknown mail backend: {mail.backend}")
    mail.username = os.environ.get(ENV_MAIL_USERNAME, mail.username)
    mail.password = os.environ.get(ENV_MAIL_PASSWORD, mail.password)
    config.mail = mail

    # fail fast: referenced files must exist and parse
    for label, p in (
        ("whitelist", config.whitelist_path),
        ("roster", config.roster_path),
        ("adjectives", config.adjectives_path),
        ("modifiers", config.modifiers_path),
        ("nouns", config.nouns_path),
    ):
        if p is not None and not p.exists():
            raise ValidationError(f"{label} file not found: {p}")
    roster = ModeratorRoster()
    roster.load(config.roster_path)
    if len(roster) < MIN_ROSTER:
        raise ValidationError(
            f"the roster lists {len(roster)} moderators; at least {MIN_ROSTER} are required"
        )
    return config


def update_config(path, section: str, values: dict[str, str]) -> None:
    """Rewrite selected keys in the INI file, preserving everything else."""
    path = Path(path)
    parser = configparser.ConfigParser()
    if path.exists():
        parser.read(path, encoding="utf-8")
    if not parser.has_section(section):
        parser.add_section(section)
    for key, value in values.items():
        parser.set(section, key, value)
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)
