"""Descriptive statistics over the published corpus and the event log.

Everything here is a pure function over already-exported records: corpus
rows, vote tallies, event entries, and an optional incivility annotation
set. Nothing reaches back into the live service, so the same inputs always
produce the same report.

Contributor counts are counts of distinct pseudonyms. Because logins are
unlinkable by design, one person returning across logins appears as several
contributors; reports state this limitation rather than pretending to
person-level counts.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import date, datetime, time, timedelta, timezone
from typing import Iterable, Mapping, Optional, Sequence
from zoneinfo import ZoneInfo

from .errors import ValidationError

EVENT_KINDS = ("submission", "view", "vote")

RESERVED_CATEGORY = "Moderators"


def _parse_ts(value) -> datetime:
    if isinstance(value, datetime):
        ts = value
    else:
        ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        raise ValidationError("event timestamps must be timezone-aware")
    return ts


def pct(numerator: int, denominator: int) -> float:
    """Percentage to one decimal place; 0.0 for an empty denominator."""
    if denominator == 0:
        return 0.0
    return round(100.0 * numerator / denominator, 1)


# -- event log ----------------------------------------------------------------


def activity_histogram(
    events: Sequence[Mapping],
    bucket: timedelta,
    kinds: Optional[Iterable[str]] = None,
    tz: str = "Europe/London",
    span: Optional[tuple[datetime, datetime]] = None,
) -> list[dict]:
    """Event counts per fixed-width bucket.

    Buckets start at the local midnight preceding the first event (or the
    span start) and step by the given duration; every event lands in exactly
    one bucket. Returns [{"start": iso, "count": n}, ...].
    """
    if bucket <= timedelta(0):
        raise ValidationError("bucket duration must be positive")
    wanted = set(kinds) if kinds is not None else set(EVENT_KINDS)
    stamped = [
        _parse_ts(e["timestamp"]) for e in events if e["kind"] in wanted
    ]
    if span is not None:
        lo, hi = span
    elif stamped:
        lo, hi = min(stamped), max(stamped)
    else:
        return []
    zone = ZoneInfo(tz)
    origin = datetime.combine(
        lo.astimezone(zone).date(), time(0, 0), tzinfo=zone
    ).astimezone(timezone.utc)
    n_buckets = int((hi - origin) // bucket) + 1
    counts = [0] * n_buckets
    for ts in stamped:
        idx = int((ts - origin) // bucket)
        if 0 <= idx < n_buckets:
            counts[idx] += 1
    return [
        {"start": (origin + i * bucket).isoformat(), "count": counts[i]}
        for i in range(n_buckets)
    ]


def engagement_series(
    events: Sequence[Mapping],
    tz: str = "Europe/London",
    non_working: Iterable[date] = (),
) -> list[dict]:
    """View counts per local calendar day, including zero-view days in the
    observed range. Days in the supplied non-working calendar are flagged."""
    zone = ZoneInfo(tz)
    off = set(non_working)
    views = [
        _parse_ts(e["timestamp"]).astimezone(zone).date()
        for e in events
        if e["kind"] == "view"
    ]
    if not views:
        return []
    day = min(views)
    last = max(views)
    per_day: dict[date, int] = {}
    for d in views:
        per_day[d] = per_day.get(d, 0) + 1
    out = []
    while day <= last:
        out.append(
            {
                "day": day.isoformat(),
                "views": per_day.get(day, 0),
                "non_working": day in off,
            }
        )
        day += timedelta(days=1)
    return out


# -- corpus -------------------------------------------------------------------


@dataclass(frozen=True)
class ThreadStats:
    n_posts: int
    n_comments: int
    published_total: int
    pct_posts_with_3plus_comments: float
    pct_posts_spanning_3plus_days: float
    mean_votes_3plus: float
    mean_votes_lt3: float
    n_uncivil: int
    incivility_ratio: Optional[float]  # percentage, 1 decimal; None without annotations


def _label_date(label: Optional[str]) -> Optional[str]:
    # "dd/mm/yy AM" -> "dd/mm/yy"
    if not label:
        return None
    return label.split()[0]


def thread_stats(
    corpus: Sequence[Mapping],
    votes: Sequence[Mapping] = (),
    annotations: Optional[Iterable[str]] = None,
    exclude_categories: Iterable[str] = (RESERVED_CATEGORY,),
) -> ThreadStats:
    """Thread-shape and vote statistics over a published-corpus export.

    Comment counts use published comments only (the export contains nothing
    else). "Spanning 3+ days" means a post's comments carry publish labels
    from at least three distinct dates. Vote means are arithmetic means of
    net tallies, split by whether the post drew at least three comments.
    Messages in excluded categories (service-authored summaries) do not
    count as contributions.
    """
    excluded = set(exclude_categories)
    posts = [
        r
        for r in corpus
        if r["kind"] == "post" and r.get("category") not in excluded
    ]
    post_ids = {r["id"] for r in posts}
    comments = [
        r for r in corpus if r["kind"] == "comment" and r["parent"] in post_ids
    ]
    comment_count: dict[str, int] = {pid: 0 for pid in post_ids}
    label_dates: dict[str, set[str]] = {pid: set() for pid in post_ids}
    for c in comments:
        comment_count[c["parent"]] += 1
        d = _label_date(c.get("publish_label"))
        if d:
            label_dates[c["parent"]].add(d)
    n_posts = len(posts)
    n_comments = len(comments)
    with_3plus = [pid for pid in post_ids if comment_count[pid] >= 3]
    spanning = [pid for pid in post_ids if len(label_dates[pid]) >= 3]
    net: dict[str, int] = {}
    for v in votes:
        net[v["post_id"]] = v.get("net", v.get("up", 0) - v.get("down", 0))
    group_hot = [net.get(pid, 0) for pid in with_3plus]
    group_cold = [net.get(pid, 0) for pid in post_ids if comment_count[pid] < 3]
    published_total = n_posts + n_comments
    if annotations is not None:
        corpus_ids = post_ids | {c["id"] for c in comments}
        n_uncivil = len(set(annotations) & corpus_ids)
        ratio = pct(n_uncivil, published_total)
    else:
        n_uncivil = 0
        ratio = None
    return ThreadStats(
        n_posts=n_posts,
        n_comments=n_comments,
        published_total=published_total,
        pct_posts_with_3plus_comments=pct(len(with_3plus), n_posts),
        pct_posts_spanning_3plus_days=pct(len(spanning), n_posts),
        mean_votes_3plus=_mean(group_hot),
        mean_votes_lt3=_mean(group_cold),
        n_uncivil=n_uncivil,
        incivility_ratio=ratio,
    )


def _mean(values: Sequence[int]) -> float:
    if not values:
        return 0.0
    return sum(values) / len(values)


def contributor_count(
    corpus: Sequence[Mapping],
    exclude_categories: Iterable[str] = (RESERVED_CATEGORY,),
) -> int:
    """Distinct contributing pseudonyms in a corpus export."""
    excluded = set(exclude_categories)
    return len(
        {
            r["pseudonym"]
            for r in corpus
            if r.get("category") not in excluded
        }
    )


def participation_ratio(contributors: int, eligible: int) -> float:
    if eligible <= 0:
        raise ValidationError("eligible population must be positive")
    if contributors < 0:
        raise ValidationError("contributor count cannot be negative")
    return contributors / eligible


# -- report -------------------------------------------------------------------


def build_report(
    corpus: Sequence[Mapping],
    events: Sequence[Mapping] = (),
    votes: Sequence[Mapping] = (),
    annotations: Optional[Iterable[str]] = None,
    eligible: Optional[int] = None,
    tz: str = "Europe/London",
    non_working: Iterable[date] = (),
    bucket_hours: int = 24,
) -> tuple[list[dict], str]:
    """Assemble the full report: a list of metric records plus a text table."""
    stats = thread_stats(corpus, votes, annotations)
    contributors = contributor_count(corpus)
    records: list[dict] = [
        {"metric": k, "value": v} for k, v in asdict(stats).items()
    ]
    records.append({"metric": "contributors", "value": contributors})
    if eligible is not None:
        ratio = participation_ratio(contributors, eligible)
        records.append({"metric": "eligible", "value": eligible})
        records.append({"metric": "participation_pct", "value": round(100 * ratio, 1)})
    histogram = activity_histogram(events, timedelta(hours=bucket_hours), tz=tz)
    series = engagement_series(events, tz=tz, non_working=non_working)
    if histogram:
        records.append({"metric": "activity_histogram", "value": histogram})
    if series:
        records.append({"metric": "engagement_series", "value": series})

    lines = [
        "Corpus report",
        "=============",
        f"posts                          {stats.n_posts}",
        f"comments                       {stats.n_comments}",
        f"published total                {stats.published_total}",
        f"posts with 3+ comments         {stats.pct_posts_with_3plus_comments}%",
        f"posts with comments on 3+ days {stats.pct_posts_spanning_3plus_days}%",
        f"mean net votes (3+ comments)   {stats.mean_votes_3plus:.2f}",
        f"mean net votes (<3 comments)   {stats.mean_votes_lt3:.2f}",
    ]
    if stats.incivility_ratio is not None:
        lines.append(
            f"annotated uncivil              {stats.n_uncivil} ({stats.incivility_ratio}%)"
        )
    lines.append(f"distinct contributors          {contributors}")
    if eligible is not None:
        lines.append(
            f"participation                  {contributors}/{eligible}"
            f" ({round(100 * contributors / eligible, 1)}%)"
        )
    if series:
        lines.append("")
        lines.append("views per day")
        for row in series:
            flag = "  (non-working)" if row["non_working"] else ""
            lines.append(f"  {row['day']}  {row['views']}{flag}")
    lines.append("")
    lines.append(
        "All percentages are recomputed from the raw records supplied; "
        "no externally reported figure is assumed."
    )
    lines.append(
        "Contributor counts are distinct pseudonyms; person-level counts "
        "are impossible by design."
    )
    return records, "\n".join(lines)


def write_report(records: list[dict], text: str, out_prefix: str) -> tuple[str, str]:
    records_path = f"{out_prefix}.jsonl"
    text_path = f"{out_prefix}.txt"
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return records_path, text_path
