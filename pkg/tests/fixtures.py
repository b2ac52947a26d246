"""Synthetic corpus shaped like a two-week live deployment.

36 contributor posts and 149 comments (185 published entries) from 144
distinct pseudonyms, spread over 14 days of AM/PM release batches, plus two
service-authored summary posts that statistics must ignore. 22 posts drew
three or more comments; 15 posts drew comments across three or more release
dates; 23 entries carry incivility annotations.
"""

from datetime import date, datetime, time, timedelta
from zoneinfo import ZoneInfo

LONDON = ZoneInfo("Europe/London")
FIRST_DAY = date(2019, 6, 3)  # a Monday

ELIGIBLE = 604
NON_WORKING = (date(2019, 6, 8), date(2019, 6, 9), date(2019, 6, 10))

CATEGORIES = ("General", "Facilities", "Pay and Conditions", "Wellbeing")

# comment counts: 15 posts with multi-day threads, 7 with single-day threads,
# 14 with fewer than three comments; 123 + 26 = 149 comments in total
SPAN_COUNTS = (9, 8, 8, 7, 7, 6, 6, 6, 5, 5, 5, 5, 4, 4, 4)
SAME_DAY_COUNTS = (6, 6, 5, 5, 4, 4, 4)
COLD_COUNTS = (2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1)

# net votes: the 22 posts with 3+ comments sum to 126 (mean 5.73), the other
# 14 sum to 41 (mean 2.93)
HOT_NETS = (12, 11, 10, 9, 8, 8, 7, 7, 6, 6, 6, 5, 5, 5, 4, 4, 3, 3, 2, 2, 2, 1)
COLD_NETS = (7, 6, 5, 4, 4, 3, 3, 2, 2, 2, 1, 1, 1, 0)

# views per local day; indexes 5-7 are the non-working days
VIEWS_PER_DAY = (120, 95, 80, 80, 70, 20, 15, 25, 75, 70, 65, 60, 55, 50)


def _label(day_index: int, half: str) -> str:
    day = FIRST_DAY + timedelta(days=day_index)
    return day.strftime("%d/%m/%y") + " " + half


def deployment_corpus():
    """Returns (corpus_records, vote_records, uncivil_ids)."""
    authors = [f"pseudonym {i:03d}" for i in range(144)]
    cursor = 0

    def next_author():
        nonlocal cursor
        name = authors[cursor % len(authors)]
        cursor += 1
        return name

    records = []
    comment_counts = list(SPAN_COUNTS) + list(SAME_DAY_COUNTS) + list(COLD_COUNTS)
    post_days = []
    for i in range(36):
        day = i % 10
        post_days.append(day)
        records.append(
            {
                "id": f"p{i + 1:02d}",
                "kind": "post",
                "parent": None,
                "category": CATEGORIES[i % 4],
                "pseudonym": next_author(),
                "publish_label": _label(day, "AM" if i % 2 == 0 else "PM"),
                "moderated_flag": i < 5,
                "body": f"post body {i + 1}",
            }
        )

    comment_no = 0
    for i, n_comments in enumerate(comment_counts):
        post_id = f"p{i + 1:02d}"
        base_day = post_days[i]
        multi_day = i < len(SPAN_COUNTS)
        for k in range(n_comments):
            comment_no += 1
            # multi-day threads spread across 3-4 consecutive release dates
            day = base_day + (k % min(n_comments, 4)) if multi_day else base_day
            records.append(
                {
                    "id": f"c{comment_no:03d}",
                    "kind": "comment",
                    "parent": post_id,
                    "category": None,
                    "pseudonym": next_author(),
                    "publish_label": _label(day, "PM" if k % 2 else "AM"),
                    "moderated_flag": comment_no <= 16,
                    "body": f"comment body {comment_no}",
                }
            )

    # service-authored summaries, excluded from contribution statistics
    for j in range(2):
        records.append(
            {
                "id": f"s{j + 1:02d}",
                "kind": "post",
                "parent": None,
                "category": "Moderators",
                "pseudonym": "moderators",
                "publish_label": _label(j, "AM"),
                "moderated_flag": False,
                "body": f"summary body {j + 1}",
            }
        )

    votes = []
    for i, net in enumerate(list(HOT_NETS) + list(COLD_NETS)):
        votes.append(
            {"post_id": f"p{i + 1:02d}", "up": net + 2, "down": 2, "net": net}
        )

    uncivil = [f"c{k:03d}" for k in range(1, 18)]
    uncivil += ["p02", "p07", "p11", "p19", "p23", "p30"]
    return records, votes, uncivil


def deployment_events(corpus):
    """View traffic across the 14 days, plus submission and vote events."""
    post_ids = [
        r["id"] for r in corpus if r["kind"] == "post" and r["category"] != "Moderators"
    ]
    events = []
    for day_index, n_views in enumerate(VIEWS_PER_DAY):
        base = datetime.combine(
            FIRST_DAY + timedelta(days=day_index), time(9, 0), tzinfo=LONDON
        )
        for k in range(n_views):
            ts = base + timedelta(minutes=(k * 7) % 480)
            events.append(
                {
                    "kind": "view",
                    "subject": post_ids[k % len(post_ids)],
                    "timestamp": ts.isoformat(),
                }
            )
    for i, post_id in enumerate(post_ids):
        ts = datetime.combine(
            FIRST_DAY + timedelta(days=i % 14), time(10, 30), tzinfo=LONDON
        )
        events.append({"kind": "submission", "subject": post_id, "timestamp": ts.isoformat()})
        events.append(
            {
                "kind": "vote",
                "subject": post_id,
                "timestamp": (ts + timedelta(hours=2)).isoformat(),
            }
        )
    events.sort(key=lambda e: e["timestamp"])
    return events
