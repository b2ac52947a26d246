"""Operator command line: run the service and manage its files.

Whitelist and roster edits act on the files directly; the server reads them
at startup, so a restart picks up changes. Exports read a saved state file,
which keeps the analytics pipeline usable offline.
"""

from __future__ import annotations

import json
import os
import secrets
import sys
from datetime import date
from pathlib import Path

import click

from .access_gate import Whitelist
from .analytics import build_report, write_report
from .config import (
    DEFAULT_CONFIG_PATH,
    ENV_CONFIG,
    ModeratorRoster,
    load_config,
    parse_release_times,
    update_config,
)
from .errors import ServiceError
from .mailer import MemoryMailer
from .service import ForumService


def _config_path(value) -> Path:
    return Path(value or os.environ.get(ENV_CONFIG) or DEFAULT_CONFIG_PATH)


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@click.group()
def main():
    """Anonymous, pre-moderated discussion service."""


@main.command()
@click.option("--config", "config_path", default=None, help="Path to the INI config.")
@click.option("--ui", "ui_dir", default=None, help="Directory of built UI assets to serve at /ui.")
def serve(config_path, ui_dir):
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .api import create_app

    try:
        config = load_config(_config_path(config_path))
        service = ForumService.from_config(config)
    except ServiceError as exc:
        _fail(exc)
    if ui_dir is None:
        candidate = Path("frontend/dist")
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(service, ui_dir=ui_dir)
    service.start_ticker(config.poll_interval, state_path=config.state_path)
    try:
        # request logs stay off: they would pair client addresses with
        # anonymity-sensitive requests
        uvicorn.run(
            app,
            host=config.listen_host,
            port=config.listen_port,
            access_log=False,
            log_level="warning",
        )
    finally:
        service.stop_ticker()
        if config.state_path:
            service.save_state(config.state_path)


def _whitelist_file(config_path, file_path) -> Path:
    if file_path:
        return Path(file_path)
    return load_config(_config_path(config_path)).whitelist_path


@main.group()
def whitelist():
    """Manage the eligible-address whitelist."""


@whitelist.command("add")
@click.argument("pattern")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None, help="Whitelist file (skips config).")
def whitelist_add(pattern, config_path, file_path):
    try:
        path = _whitelist_file(config_path, file_path)
        wl = Whitelist()
        if path.exists():
            wl.load(path)
        wl.add(pattern)
        wl.save(path)
    except ServiceError as exc:
        _fail(exc)
    click.echo(f"added {pattern}")


@whitelist.command("remove")
@click.argument("pattern")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None)
def whitelist_remove(pattern, config_path, file_path):
    try:
        path = _whitelist_file(config_path, file_path)
        wl = Whitelist()
        wl.load(path)
        wl.remove(pattern)
        wl.save(path)
    except ServiceError as exc:
        _fail(exc)
    click.echo(f"removed {pattern}")


@whitelist.command("list")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None)
def whitelist_list(config_path, file_path):
    try:
        path = _whitelist_file(config_path, file_path)
        wl = Whitelist()
        wl.load(path)
    except ServiceError as exc:
        _fail(exc)
    for entry in wl.entries():
        click.echo(entry)


def _roster_file(config_path, file_path) -> Path:
    if file_path:
        return Path(file_path)
    return load_config(_config_path(config_path)).roster_path


@main.group()
def moderator():
    """Manage the moderator roster."""


@moderator.command("add")
@click.argument("moderator_id")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None, help="Roster file (skips config).")
def moderator_add(moderator_id, config_path, file_path):
    """Enroll a moderator and print their secret (shown exactly once)."""
    try:
        path = _roster_file(config_path, file_path)
        roster = ModeratorRoster()
        if path.exists():
            roster.load(path)
        secret = secrets.token_urlsafe(16)
        roster.add(moderator_id, secret)
        roster.save(path)
    except ServiceError as exc:
        _fail(exc)
    click.echo(f"enrolled {moderator_id}")
    click.echo(f"secret (store it now, it is not kept): {secret}")


@moderator.command("remove")
@click.argument("moderator_id")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None)
def moderator_remove(moderator_id, config_path, file_path):
    try:
        path = _roster_file(config_path, file_path)
        roster = ModeratorRoster()
        roster.load(path)
        roster.remove(moderator_id)
        roster.save(path)
    except ServiceError as exc:
        _fail(exc)
    click.echo(f"removed {moderator_id}")


@moderator.command("list")
@click.option("--config", "config_path", default=None)
@click.option("--file", "file_path", default=None)
def moderator_list(config_path, file_path):
    try:
        path = _roster_file(config_path, file_path)
        roster = ModeratorRoster()
        roster.load(path)
    except ServiceError as exc:
        _fail(exc)
    for moderator_id in sorted(roster.ids()):
        click.echo(moderator_id)


@main.group()
def schedule():
    """Release schedule settings."""


@schedule.command("set")
@click.option("--times", required=True, help='Comma-separated local times, e.g. "09:00,17:00".')
@click.option("--timezone", "tz", default=None, help="IANA timezone identifier.")
@click.option("--config", "config_path", default=None)
def schedule_set(times, tz, config_path):
    """Write release times (and optionally the timezone) into the config."""
    try:
        parse_release_times(times)  # reject malformed input before writing
        values = {"times": times}
        if tz:
            from zoneinfo import ZoneInfo

            ZoneInfo(tz)
            values["timezone"] = tz
        update_config(_config_path(config_path), "release", values)
    except ServiceError as exc:
        _fail(exc)
    except Exception:
        _fail(ValueError(f"unknown timezone: {tz}"))
    click.echo(f"release schedule set to {times}" + (f" ({tz})" if tz else ""))
    click.echo("restart the service to apply")


def _service_from_state(state_path) -> ForumService:
    service = ForumService(
        whitelist=Whitelist(), roster=ModeratorRoster(), mailer=MemoryMailer()
    )
    service.load_state(state_path)
    return service


def _write_records(records, out):
    text = "".join(json.dumps(r) + "\n" for r in records)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(records)} records to {out}")
    else:
        sys.stdout.write(text)


@main.group()
def export():
    """Export records from a saved state file."""


def _export_command(name, getter_name, help_text):
    @export.command(name, help=help_text)
    @click.option("--state", "state_path", required=True, help="Saved state file.")
    @click.option("--out", default=None, help="Output path (default: stdout).")
    def command(state_path, out):
        try:
            service = _service_from_state(state_path)
            records = getattr(service, getter_name)()
        except (ServiceError, OSError, json.JSONDecodeError) as exc:
            _fail(exc)
        _write_records(records, out)

    return command


_export_command("corpus", "export_corpus", "Published posts and comments.")
_export_command("events", "export_events", "Submission, view, and vote events.")
_export_command("votes", "export_votes", "Vote tallies per post.")
_export_command("decisions", "export_decisions", "Moderation decision audit log.")


def _read_jsonl(path) -> list[dict]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            records.append(json.loads(line))
    return records


@main.group()
def analytics():
    """Statistics over exported records."""


@analytics.command("run")
@click.option("--corpus", "corpus_path", required=True, help="Corpus export (JSONL).")
@click.option("--events", "events_path", default=None, help="Event log export (JSONL).")
@click.option("--votes", "votes_path", default=None, help="Vote tally export (JSONL).")
@click.option("--annotations", "annotations_path", default=None,
              help="Incivility annotations: one message id per line.")
@click.option("--eligible", type=int, default=None, help="Eligible population size.")
@click.option("--non-working", "non_working", default=None,
              help="Comma-separated ISO dates to flag as non-working.")
@click.option("--bucket-hours", type=int, default=24, show_default=True)
@click.option("--tz", default="Europe/London", show_default=True)
@click.option("--out", "out_prefix", required=True, help="Report path prefix.")
def analytics_run(corpus_path, events_path, votes_path, annotations_path,
                  eligible, non_working, bucket_hours, tz, out_prefix):
    """Compute the descriptive report from exported records."""
    try:
        corpus = _read_jsonl(corpus_path)
        events = _read_jsonl(events_path) if events_path else []
        votes = _read_jsonl(votes_path) if votes_path else []
        annotations = None
        if annotations_path:
            annotations = [
                line.strip()
                for line in Path(annotations_path).read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
        off_days = []
        if non_working:
            off_days = [date.fromisoformat(d.strip()) for d in non_working.split(",") if d.strip()]
        records, text = build_report(
            corpus,
            events=events,
            votes=votes,
            annotations=annotations,
            eligible=eligible,
            tz=tz,
            non_working=off_days,
            bucket_hours=bucket_hours,
        )
        records_path, text_path = write_report(records, text, out_prefix)
    except (ServiceError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(text)
    click.echo("")
    click.echo(f"report records: {records_path}")
    click.echo(f"report table:   {text_path}")


if __name__ == "__main__":
    main()
