import random
import re
from datetime import datetime
from zoneinfo import ZoneInfo

import pytest

from voicebox import (
    ForumService,
    MemoryMailer,
    ModeratorRoster,
    SimulatedClock,
    Whitelist,
)

LONDON = ZoneInfo("Europe/London")

# Monday morning, before the day's first release
START = datetime(2019, 6, 3, 7, 0, tzinfo=LONDON)

MOD_SECRETS = {
    "m1": "pw-one",
    "m2": "pw-two",
    "m3": "pw-three",
    "m4": "pw-four",
}


def extract_token(mail_body: str) -> str:
    return re.search(r"#(\S+)", mail_body).group(1)


@pytest.fixture
def clock():
    return SimulatedClock(START)


@pytest.fixture
def mailer():
    return MemoryMailer()


@pytest.fixture
def whitelist():
    return Whitelist(["@uni.example", "guest@partner.example"])


@pytest.fixture
def roster():
    r = ModeratorRoster()
    for mod_id, secret in MOD_SECRETS.items():
        r.add(mod_id, secret)
    return r


@pytest.fixture
def service(clock, mailer, whitelist, roster):
    return ForumService(
        whitelist=whitelist,
        roster=roster,
        mailer=mailer,
        clock=clock,
        token_rng=random.Random(101),
        name_rng=random.Random(202),
        batch_rng=random.Random(303),
    )


@pytest.fixture
def login(service, mailer):
    """Request access, pull the link out of the outbox, redeem it."""

    counter = iter(range(1000))

    def _login(email=None):
        email = email or f"user{next(counter)}@uni.example"
        service.request_access(email)
        token = extract_token(mailer.outbox[-1].body)
        return service.redeem(token)

    return _login


@pytest.fixture
def run_session(service):
    """Open a session, decide the whole worklist, close it.

    `decide` maps a worklist item to record_decision kwargs; the default
    approves everything as-is.
    """

    def _run(mods=("m1", "m2", "m3"), target=None, decide=None):
        target = target or service.next_release()
        opened = service.open_moderation(list(mods), target)
        for item in service.moderation_worklist(opened["id"]):
            kwargs = decide(item) if decide else {}
            kwargs.setdefault("votes", {m: "approve" for m in mods})
            service.record_decision(opened["id"], item["id"], **kwargs)
        return service.close_moderation(opened["id"])

    return _run


@pytest.fixture
def client(service):
    from fastapi.testclient import TestClient

    from voicebox.api import create_app

    return TestClient(create_app(service))


def moderator_headers(mod_id="m1"):
    return {"X-Moderator-Id": mod_id, "X-Moderator-Secret": MOD_SECRETS[mod_id]}
