"""Mail delivery backends.

The only place an email address is allowed to travel is into Mailer.send.
Backends must not log, persist, or otherwise retain the recipient address.
"""

from __future__ import annotations

import smtplib
from dataclasses import dataclass
from email.message import EmailMessage


class Mailer:
    def send(self, to_address: str, subject: str, body: str) -> None:
        raise NotImplementedError


@dataclass
class OutboundMail:
    to_address: str
    subject: str
    body: str


class MemoryMailer(Mailer):
    """Keeps sent mail in process memory. For tests and local development."""

    def __init__(self):
        self.outbox: list[OutboundMail] = []

    def send(self, to_address: str, subject: str, body: str) -> None:
        self.outbox.append(OutboundMail(to_address, subject, body))


class FailingMailer(Mailer):
    """Always fails. Lets tests exercise the delivery-error path."""

    def send(self, to_address: str, subject: str, body: str) -> None:
        raise ConnectionError("mail backend unavailable")


class SmtpMailer(Mailer):
    def __init__(
        self,
        host: str,
        port: int,
        sender: str,
        username: str | None = None,
        password: str | None = None,
        use_tls: bool = False,
    ):
        self.host = host
        self.port = port
        self.sender = sender
        self.username = username
        self.password = password
        self.use_tls = use_tls

    def send(self, to_address: str, subject: str, body: str) -> None:
        msg = EmailMessage()
        msg["From"] = self.sender
        msg["To"] = to_address
        msg["Subject"] = subject
        msg.set_content(body)
        with smtplib.SMTP(self.host, self.port) as smtp:
            if self.use_tls:
                smtp.starttls()
            if self.username and self.password:
                smtp.login(self.username, self.password)
            smtp.send_message(msg)
