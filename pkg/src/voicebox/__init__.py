"""Anonymous, pre-moderated discussion service.

Four load-bearing properties, each owned by one module:

* access_gate: whitelisted addresses receive one-time login links whose
  tokens carry no trace of the address; each login yields a fresh
  three-word pseudonym.
* moderation_engine: nothing is published without a quorum decision;
  rejected content is erased permanently; every session publishes a
  transparency summary.
* release_scheduler: approved messages appear only in shuffled batches at
  fixed local times, labeled with a half-day stamp.
* content_store: readers see published messages only; votes are tallied
  without attribution.

analytics computes descriptive statistics from the exported records, and
service/api/cli wire everything into a runnable HTTP service.
"""

from .access_gate import (
    ACCESS_RECEIPT,
    AccessGate,
    Pseudonym,
    PseudonymSpaceExhausted,
    Session,
    TOKEN_REJECTED_DETAIL,
    TokenRejected,
    Whitelist,
    WordLists,
    default_word_lists,
    load_word_lists,
    mint_pseudonym,
)
from .analytics import (
    ThreadStats,
    activity_histogram,
    build_report,
    contributor_count,
    engagement_series,
    participation_ratio,
    pct,
    thread_stats,
    write_report,
)
from .clock import Clock, SimulatedClock, SystemClock
from .config import ModeratorRoster, ServiceConfig, load_config
from .content_store import (
    ContentStore,
    Message,
    ReservedCategoryError,
    Thread,
    UnknownTargetError,
    VoteTally,
)
from .errors import (
    AuthorizationError,
    DeliveryError,
    ServiceError,
    ValidationError,
)
from .mailer import FailingMailer, Mailer, MemoryMailer, OutboundMail, SmtpMailer
from .moderation_engine import (
    Decision,
    ModerationEngine,
    ModerationSession,
    SessionSummary,
    resolve,
)
from .release_scheduler import (
    PublishBatch,
    ReleaseCoordinator,
    ReleaseSchedule,
    publish_label,
)
from .service import ForumService

__version__ = "1.0.0"

__all__ = [
    "ACCESS_RECEIPT",
    "AccessGate",
    "AuthorizationError",
    "Clock",
    "ContentStore",
    "Decision",
    "DeliveryError",
    "FailingMailer",
    "ForumService",
    "Mailer",
    "MemoryMailer",
    "Message",
    "ReservedCategoryError",
    "ModerationEngine",
    "ModerationSession",
    "ModeratorRoster",
    "OutboundMail",
    "PublishBatch",
    "Pseudonym",
    "PseudonymSpaceExhausted",
    "ReleaseCoordinator",
    "ReleaseSchedule",
    "ServiceConfig",
    "ServiceError",
    "Session",
    "SessionSummary",
    "SimulatedClock",
    "SmtpMailer",
    "SystemClock",
    "TOKEN_REJECTED_DETAIL",
    "Thread",
    "UnknownTargetError",
    "ThreadStats",
    "TokenRejected",
    "ValidationError",
    "VoteTally",
    "Whitelist",
    "WordLists",
    "activity_histogram",
    "build_report",
    "contributor_count",
    "default_word_lists",
    "engagement_series",
    "load_config",
    "load_word_lists",
    "mint_pseudonym",
    "participation_ratio",
    "pct",
    "publish_label",
    "resolve",
    "thread_stats",
    "write_report",
]
