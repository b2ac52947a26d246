"""Wall-clock abstraction so schedule-driven behavior can run under test control."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone


class Clock:
    """Source of the current instant. Always returns an aware UTC datetime."""

    def now(self) -> datetime:
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class SimulatedClock(Clock):
    """Manually driven clock. Only moves forward, like the real one."""

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("simulated clock requires an aware datetime")
        self._now = start.astimezone(timezone.utc)

    def now(self) -> datetime:
        return self._now

    def advance(self, delta: timedelta) -> datetime:
        if delta < timedelta(0):
            raise ValueError("clock cannot move backwards")
        self._now += delta
        return self._now

    def set_to(self, instant: datetime) -> datetime:
        if instant.tzinfo is None:
            raise ValueError("instant must be timezone-aware")
        instant = instant.astimezone(timezone.utc)
        if instant < self._now:
            raise ValueError("clock cannot move backwards")
        self._now = instant
        return self._now
