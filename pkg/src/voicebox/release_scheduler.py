"""Batched publication on a fixed local-time schedule.

Messages never appear the moment they are approved. They wait for the next
scheduled release instant, and each batch is stamped with a coarse label
("dd/mm/yy AM" or "dd/mm/yy PM") instead of a timestamp, so readers cannot
correlate publication with submission time. Within a batch the approval
order is shuffled for the same reason.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from typing import Callable, Iterable, Optional
from zoneinfo import ZoneInfo

from .clock import Clock
from .errors import ValidationError

DEFAULT_RELEASE_TIMES = (time(9, 0), time(17, 0))
DEFAULT_TIMEZONE = "Europe/London"


def publish_label(instant: datetime, tz: ZoneInfo) -> str:
    """Half-day label for a release instant: "dd/mm/yy AM" or "dd/mm/yy PM".

    AM covers local 00:00 through 11:59, PM the rest. This is the only
    time-of-day information the published record carries.
    """
    local = instant.astimezone(tz)
    half = "AM" if local.hour < 12 else "PM"
    return f"{local.strftime('%d/%m/%y')} {half}"


class ReleaseSchedule:
    """The recurring daily release instants, defined on local wall clocks.

    Release times are local so that "9am" stays 9am across daylight-saving
    transitions; the schedule converts to aware UTC datetimes on demand.
    """

    def __init__(
        self,
        times: Iterable[time] = DEFAULT_RELEASE_TIMES,
        tz: str = DEFAULT_TIMEZONE,
    ):
        times = sorted(set(times))
        if not times:
            raise ValidationError("schedule needs at least one release time")
        for t in times:
            if t.tzinfo is not None:
                raise ValidationError("release times must be naive local times")
        self.times: tuple[time, ...] = tuple(times)
        try:
            self.tz = ZoneInfo(tz)
        except Exception:
            raise ValidationError(f"unknown timezone: {tz}") from None
        self.tz_name = tz

    def _instant(self, day: date, t: time) -> datetime:
        return datetime.combine(day, t, tzinfo=self.tz).astimezone(timezone.utc)

    def next_release(self, now: datetime) -> datetime:
        """First scheduled instant strictly after now."""
        local_day = now.astimezone(self.tz).date()
        # The previous day guards against a UTC/local date mismatch around
        # midnight; scanning three days always finds a strictly later slot.
        for offset in (-1, 0, 1):
            day = local_day + timedelta(days=offset)
            for t in self.times:
                instant = self._instant(day, t)
                if instant > now:
                    return instant
        raise AssertionError("unreachable: no release within a day")

    def releases_between(self, start: datetime, end: datetime) -> list[datetime]:
        """Every scheduled instant in (start, end], oldest first."""
        out = []
        cursor = start
        while True:
            nxt = self.next_release(cursor)
            if nxt > end:
                return out
            out.append(nxt)
            cursor = nxt

    def label_for(self, instant: datetime) -> str:
        return publish_label(instant, self.tz)

    def describe(self) -> dict:
        return {
            "times": [t.strftime("%H:%M") for t in self.times],
            "timezone": self.tz_name,
        }


@dataclass(frozen=True)
class PublishBatch:
    label: str
    released_at: datetime
    message_ids: tuple[str, ...]
    deferred_from: tuple[datetime, ...] = ()


@dataclass
class DeferralAlert:
    scheduled_for: datetime
    raised_at: datetime
    reason: str = "moderation session still open"


class ReleaseCoordinator:
    """Drives the schedule: collect approved messages, mint batches.

    poll() is the single entry point; the host calls it whenever time may
    have passed (a ticker thread in live deployments, explicit calls under a
    simulated clock in tests). Each due instant is handled exactly once, in
    order. If the gate callback reports a moderation session still open for
    an instant, that release is deferred: no batch is minted, an alert is
    recorded, and the accumulated messages simply wait for the next instant
    that is clear.
    """

    def __init__(
        self,
        schedule: ReleaseSchedule,
        clock: Clock,
        collect: Callable[[], list[str]],
        apply: Callable[[PublishBatch], None],
        is_clear: Callable[[datetime], bool] = lambda instant: True,
        rng: Optional[random.Random] = None,
        on_alert: Optional[Callable[[DeferralAlert], None]] = None,
    ):
        self._schedule = schedule
        self._clock = clock
        self._collect = collect
        self._apply = apply
        self._is_clear = is_clear
        self._rng = rng if rng is not None else random.Random()
        self._on_alert = on_alert
        self._lock = threading.Lock()
        self._cursor = clock.now()
        self._deferred: list[datetime] = []
        self.batches: list[PublishBatch] = []
        self.alerts: list[DeferralAlert] = []

    @property
    def schedule(self) -> ReleaseSchedule:
        return self._schedule

    def replace_schedule(self, schedule: ReleaseSchedule) -> None:
        with self._lock:
            self._schedule = schedule

    def next_release(self) -> datetime:
        with self._lock:
            return self._schedule.next_release(max(self._cursor, self._clock.now()))

    def poll(self) -> list[PublishBatch]:
        """Process every release instant that has come due. Idempotent."""
        with self._lock:
            now = self._clock.now()
            due = self._schedule.releases_between(self._cursor, now)
            minted = []
            for instant in due:
                self._cursor = instant
                if not self._is_clear(instant):
                    alert = DeferralAlert(scheduled_for=instant, raised_at=now)
                    self.alerts.append(alert)
                    self._deferred.append(instant)
                    if self._on_alert is not None:
                        self._on_alert(alert)
                    continue
                minted.append(self._mint(instant))
            self._cursor = max(self._cursor, now)
            return minted

    def _mint(self, instant: datetime) -> PublishBatch:
        ids = list(self._collect())
        self._rng.shuffle(ids)
        batch = PublishBatch(
            label=self._schedule.label_for(instant),
            released_at=instant,
            message_ids=tuple(ids),
            deferred_from=tuple(self._deferred),
        )
        self._deferred = []
        self._apply(batch)
        self.batches.append(batch)
        return batch

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "cursor": self._cursor.isoformat(),
                "deferred": [d.isoformat() for d in self._deferred],
                "schedule": self._schedule.describe(),
                "batches": [
                    {
                        "label": b.label,
                        "released_at": b.released_at.isoformat(),
                        "message_ids": list(b.message_ids),
                        "deferred_from": [d.isoformat() for d in b.deferred_from],
                    }
                    for b in self.batches
                ],
            }

    def restore(self, state: dict) -> None:
        with self._lock:
            self._cursor = datetime.fromisoformat(state["cursor"])
            self._deferred = [datetime.fromisoformat(d) for d in state.get("deferred", [])]
            sched = state.get("schedule")
            if sched:
                self._schedule = ReleaseSchedule(
                    times=[time.fromisoformat(t) for t in sched["times"]],
                    tz=sched["timezone"],
                )
            self.batches = [
                PublishBatch(
                    label=b["label"],
                    released_at=datetime.fromisoformat(b["released_at"]),
                    message_ids=tuple(b["message_ids"]),
                    deferred_from=tuple(
                        datetime.fromisoformat(d) for d in b.get("deferred_from", [])
                    ),
                )
                for b in state.get("batches", [])
            ]
