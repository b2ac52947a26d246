from datetime import datetime, timedelta, timezone

import pytest

from voicebox import (
    AuthorizationError,
    ContentStore,
    Pseudonym,
    Session,
    SimulatedClock,
    ValidationError,
)
from voicebox.content_store import (
    MAX_BODY_LENGTH,
    ReservedCategoryError,
    UnknownTargetError,
)

from conftest import START


def make_session(clock, name=("calm", "walnut", "otter"), ttl_hours=12):
    now = clock.now()
    return Session(
        id=f"sess-{'-'.join(name)}",
        pseudonym=Pseudonym(name),
        created_at=now,
        expires_at=now + timedelta(hours=ttl_hours),
    )


@pytest.fixture
def clock():
    return SimulatedClock(START)


@pytest.fixture
def store(clock):
    return ContentStore(clock)


@pytest.fixture
def session(clock):
    return make_session(clock)


def publish_all(store, clock, label="03/06/19 AM"):
    ids = [m.id for m in store.approved_in_order()]
    store.apply_publish(ids, label, clock.now())
    return ids


def test_submission_starts_pending_and_invisible(store, session):
    message = store.submit_message(session, "post", "General", "hello", title="Hi")
    assert message.state == "pending"
    assert store.browse() == []
    with pytest.raises(UnknownTargetError):
        store.get_thread(message.id)


def test_pending_and_unknown_targets_are_indistinguishable(store, session):
    message = store.submit_message(session, "post", "General", "hello")
    with pytest.raises(UnknownTargetError) as pending:
        store.submit_message(session, "comment", message.id, "reply")
    with pytest.raises(UnknownTargetError) as unknown:
        store.submit_message(session, "comment", "no-such-id", "reply")
    assert str(pending.value) == str(unknown.value)


def test_reserved_category_refuses_direct_submissions(store, session):
    with pytest.raises(ReservedCategoryError):
        store.submit_message(session, "post", "Moderators", "hello")


def test_submission_validation(store, session, clock):
    with pytest.raises(ValidationError):
        store.submit_message(session, "post", "General", "")
    with pytest.raises(ValidationError):
        store.submit_message(session, "post", "General", "x" * (MAX_BODY_LENGTH + 1))
    with pytest.raises(ValidationError):
        store.submit_message(session, "post", "NoSuchCategory", "hello")
    with pytest.raises(ValidationError):
        store.submit_message(session, "sticker", "General", "hello")
    stale = make_session(clock, ("old", "oak", "elk"), ttl_hours=0)
    with pytest.raises(AuthorizationError):
        store.submit_message(stale, "post", "General", "hello")


def test_publish_flow_and_thread_order(store, clock, session):
    post = store.submit_message(session, "post", "General", "root")
    store.mark_approved(post.id)
    publish_all(store, clock)

    first = store.submit_message(session, "comment", post.id, "first batch")
    second = store.submit_message(session, "comment", post.id, "also first batch")
    for m in (second, first):  # approval order differs from submission order
        store.mark_approved(m.id)
    clock.advance(timedelta(hours=8))
    publish_all(store, clock, label="03/06/19 PM")

    third = store.submit_message(session, "comment", post.id, "second batch")
    store.mark_approved(third.id)
    clock.advance(timedelta(hours=16))
    publish_all(store, clock, label="04/06/19 AM")

    thread = store.get_thread(post.id)
    # batch first, then submission order within the batch
    assert [c.body for c in thread.comments] == [
        "first batch",
        "also first batch",
        "second batch",
    ]


def test_browse_filters_and_sorts(store, clock, session):
    a = store.submit_message(session, "post", "General", "coffee machine broke", title="Coffee")
    b = store.submit_message(session, "post", "Facilities", "the Coffee fund", title="Fund")
    c = store.submit_message(session, "post", "General", "parking woes")
    for m in (a, b, c):
        store.mark_approved(m.id)
    publish_all(store, clock)

    assert {m.id for m in store.browse(category="General")} == {a.id, c.id}
    # substring match over title and body, case-insensitive
    assert {m.id for m in store.browse(query="coffee")} == {a.id, b.id}
    assert [m.id for m in store.browse(query="COFFEE", category="Facilities")] == [b.id]
    with pytest.raises(ValidationError):
        store.browse(category="NoSuchCategory")
    with pytest.raises(ValidationError):
        store.browse(sort="oldest")

    voter = make_session(clock, ("keen", "maple", "lynx"))
    store.cast_vote(voter, c.id, "up")
    assert store.browse(sort="votes")[0].id == c.id


def test_browse_newest_puts_later_batches_first(store, clock, session):
    early = store.submit_message(session, "post", "General", "early")
    store.mark_approved(early.id)
    publish_all(store, clock)
    late = store.submit_message(session, "post", "General", "late")
    store.mark_approved(late.id)
    clock.advance(timedelta(hours=8))
    publish_all(store, clock, label="03/06/19 PM")
    assert [m.body for m in store.browse()] == ["late", "early"]


def test_vote_replacement_not_stacking(store, clock, session):
    post = store.submit_message(session, "post", "General", "votable")
    store.mark_approved(post.id)
    publish_all(store, clock)
    voter = make_session(clock, ("keen", "maple", "lynx"))
    assert store.cast_vote(voter, post.id, "up") == {
        "post_id": post.id, "up": 1, "down": 0, "net": 1,
    }
    assert store.cast_vote(voter, post.id, "up")["up"] == 1
    tally = store.cast_vote(voter, post.id, "down")
    assert (tally["up"], tally["down"], tally["net"]) == (0, 1, -1)


def test_vote_requires_published_post(store, clock, session):
    post = store.submit_message(session, "post", "General", "pending")
    with pytest.raises(UnknownTargetError):
        store.cast_vote(session, post.id, "up")
    store.mark_approved(post.id)
    publish_all(store, clock)
    with pytest.raises(ValidationError):
        store.cast_vote(session, post.id, "sideways")


def test_edit_sets_moderated_flag_and_identical_edit_is_refused(store, session):
    post = store.submit_message(session, "post", "General", "teh typo")
    with pytest.raises(ValidationError):
        store.mark_approved(post.id, final_body="teh typo")
    store.mark_approved(post.id, final_body="the typo")
    assert post.moderated_flag is True
    assert post.body == "the typo"
    clean = store.submit_message(session, "post", "General", "fine as is")
    store.mark_approved(clean.id)
    assert clean.moderated_flag is False


def test_rejection_erases_body_and_title(store, session):
    post = store.submit_message(session, "post", "General", "SENTINEL-BODY", title="SENTINEL-TITLE")
    store.mark_rejected(post.id)
    raw = store.message(post.id)
    assert raw.state == "rejected_erased"
    assert raw.body == ""
    assert raw.title is None
    import json

    assert "SENTINEL" not in json.dumps(store.snapshot())


def test_lifecycle_transitions_are_guarded(store, clock, session):
    post = store.submit_message(session, "post", "General", "once")
    store.mark_approved(post.id)
    with pytest.raises(ValidationError):
        store.mark_approved(post.id)
    with pytest.raises(ValidationError):
        store.mark_rejected(post.id)
    publish_all(store, clock)
    with pytest.raises(ValidationError):
        store.apply_publish([post.id], "03/06/19 PM", clock.now())


def test_summary_post_bypasses_the_reserved_guard(store):
    summary = store.insert_summary_post("counts...")
    assert summary.category == "Moderators"
    assert summary.author == "moderators"
    assert summary.state == "approved"


def test_export_schema(store, clock, session):
    post = store.submit_message(session, "post", "General", "exported", title="T")
    store.mark_approved(post.id)
    publish_all(store, clock)
    comment = store.submit_message(session, "comment", post.id, "reply")
    store.mark_approved(comment.id)
    clock.advance(timedelta(hours=8))
    publish_all(store, clock, label="03/06/19 PM")

    records = store.export_records()
    assert len(records) == 2
    for record in records:
        assert set(record) == {
            "id", "kind", "parent", "category", "pseudonym",
            "publish_label", "moderated_flag", "body",
        }
    assert records[0]["kind"] == "post"
    assert records[1]["parent"] == post.id
    # pending submissions never appear
    store.submit_message(session, "post", "General", "still pending")
    assert len(store.export_records()) == 2


def test_snapshot_restore_roundtrip(store, clock, session):
    post = store.submit_message(session, "post", "General", "kept", title="K")
    store.mark_approved(post.id)
    publish_all(store, clock)
    voter = make_session(clock, ("keen", "maple", "lynx"))
    store.cast_vote(voter, post.id, "up")

    restored = ContentStore(clock)
    restored.restore(store.snapshot())
    assert restored.export_records() == store.export_records()
    assert restored.tally(post.id) == store.tally(post.id)
    assert [c.name for c in restored.categories()] == [c.name for c in store.categories()]
