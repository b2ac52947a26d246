"""HTTP surface over the service.

Two credential systems, deliberately separate: contributors hold an opaque
session id (X-Session header) minted by the access gate; moderators hold a
roster id and secret (X-Moderator-Id / X-Moderator-Secret). No response
body ever carries an email address, a token value, a rejected body, or a
per-moderator vote.

Run the server with access logging disabled: request logs would pair client
addresses with anonymity-sensitive paths. The `serve` command does this.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import Optional

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import (
    JSONResponse,
    PlainTextResponse,
    RedirectResponse,
    Response,
)
from pydantic import BaseModel, Field

from .access_gate import ACCESS_RECEIPT, TOKEN_REJECTED_DETAIL, TokenRejected
from .content_store import ReservedCategoryError, UnknownTargetError
from .errors import (
    AuthorizationError,
    DeliveryError,
    ServiceError,
    ValidationError,
)
from .moderation_engine import QuorumError, SessionStateError
from .service import ForumService


class AccessRequest(BaseModel):
    email: str


class RedeemRequest(BaseModel):
    token: str


class AlternateAddressRequest(BaseModel):
    address: str


class PostRequest(BaseModel):
    category: str
    body: str
    title: Optional[str] = None


class CommentRequest(BaseModel):
    body: str


class VoteRequest(BaseModel):
    direction: str


class OpenSessionRequest(BaseModel):
    moderator_ids: list[str]
    target_release: datetime


class DecisionRequest(BaseModel):
    message_id: str
    votes: dict[str, str]
    challenge_kind: str = "none"
    final_body: Optional[str] = None
    reason: Optional[str] = None
    rationale: Optional[str] = None


_STATUS = [
    (TokenRejected, 403),
    (AuthorizationError, 401),
    (UnknownTargetError, 404),
    (SessionStateError, 409),
    (QuorumError, 409),
    (ReservedCategoryError, 400),
    (ValidationError, 400),
    (ServiceError, 400),
]


def _status_for(exc: ServiceError) -> int:
    for klass, code in _STATUS:
        if isinstance(exc, klass):
            return code
    return 400


def _ndjson(records: list[dict]) -> Response:
    body = "".join(json.dumps(r) + "\n" for r in records)
    return PlainTextResponse(body, media_type="application/x-ndjson")


def create_app(service: ForumService, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="voicebox", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(status_code=_status_for(exc), content={"detail": str(exc)})

    def require_session(x_session: Optional[str] = Header(default=None)) -> str:
        if not x_session:
            raise AuthorizationError("authorization required")
        service.gate.session(x_session)  # expired/unknown raises
        return x_session

    def require_moderator(
        x_moderator_id: Optional[str] = Header(default=None),
        x_moderator_secret: Optional[str] = Header(default=None),
    ) -> str:
        if not x_moderator_id or not x_moderator_secret:
            raise AuthorizationError("authorization required")
        if not service.roster.verify(x_moderator_id, x_moderator_secret):
            raise AuthorizationError("authorization required")
        return x_moderator_id

    # -- access -----------------------------------------------------------

    @app.post("/access/request")
    def access_request(payload: AccessRequest):
        # One fixed acknowledgement for every input: eligible, ineligible,
        # malformed, or undeliverable. Anything else is an address oracle.
        try:
            service.request_access(payload.email)
        except (ValidationError, DeliveryError):
            pass
        return {"detail": ACCESS_RECEIPT}

    @app.get("/redeem")
    def redeem_landing():
        # Mailed links point here with the token in the fragment; the
        # fragment never reaches the server and survives the redirect, so
        # the client app picks it up and posts it to /access/redeem.
        return RedirectResponse(url="/ui/", status_code=303)

    @app.post("/access/redeem")
    def access_redeem(payload: RedeemRequest):
        session = service.redeem(payload.token)
        return {
            "session_id": session.id,
            "pseudonym": session.pseudonym.text,
            "expires_at": session.expires_at.isoformat(),
        }

    @app.get("/session")
    def session_info(session_id: str = Depends(require_session)):
        return service.session_info(session_id)

    @app.post("/session/alternate")
    def register_alternate(
        payload: AlternateAddressRequest,
        session_id: str = Depends(require_session),
    ):
        service.register_alternate_address(session_id, payload.address)
        return {"detail": "address registered"}

    # -- reading ----------------------------------------------------------

    @app.get("/health")
    def health():
        return service.health()

    @app.get("/categories")
    def categories():
        return service.categories()

    @app.get("/posts")
    def browse(
        category: Optional[str] = None,
        q: Optional[str] = None,
        sort: str = "newest",
    ):
        return service.browse(category=category, query=q, sort=sort)

    @app.get("/posts/{post_id}")
    def thread(post_id: str):
        return service.thread(post_id)

    @app.get("/batches")
    def batches():
        return service.batches()

    # -- contributing ------------------------------------------------------

    @app.post("/posts", status_code=202)
    def submit_post(payload: PostRequest, session_id: str = Depends(require_session)):
        return service.submit_post(
            session_id, payload.category, payload.body, payload.title
        )

    @app.post("/posts/{post_id}/comments", status_code=202)
    def submit_comment(
        post_id: str,
        payload: CommentRequest,
        session_id: str = Depends(require_session),
    ):
        return service.submit_comment(session_id, post_id, payload.body)

    @app.post("/posts/{post_id}/vote")
    def cast_vote(
        post_id: str,
        payload: VoteRequest,
        session_id: str = Depends(require_session),
    ):
        return service.cast_vote(session_id, post_id, payload.direction)

    # -- moderating ----------------------------------------------------------

    @app.post("/moderation/sessions", status_code=201)
    def open_session(
        payload: OpenSessionRequest,
        moderator_id: str = Depends(require_moderator),
    ):
        if moderator_id not in payload.moderator_ids:
            raise ValidationError("the opening moderator must be present")
        target = payload.target_release
        if target.tzinfo is None:
            raise ValidationError("target_release must carry a timezone")
        return service.open_moderation(payload.moderator_ids, target)

    @app.get("/moderation/sessions")
    def list_sessions(moderator_id: str = Depends(require_moderator)):
        return service.moderation_sessions()

    @app.get("/moderation/sessions/{session_id}/worklist")
    def worklist(session_id: str, moderator_id: str = Depends(require_moderator)):
        return service.moderation_worklist(session_id)

    @app.post("/moderation/sessions/{session_id}/decisions")
    def decide(
        session_id: str,
        payload: DecisionRequest,
        moderator_id: str = Depends(require_moderator),
    ):
        return service.record_decision(
            session_id,
            payload.message_id,
            payload.votes,
            payload.challenge_kind,
            final_body=payload.final_body,
            reason=payload.reason,
            rationale=payload.rationale,
        )

    @app.post("/moderation/sessions/{session_id}/close")
    def close_session(session_id: str, moderator_id: str = Depends(require_moderator)):
        return service.close_moderation(session_id)

    # -- exports ---------------------------------------------------------------

    @app.get("/export/corpus")
    def export_corpus(moderator_id: str = Depends(require_moderator)):
        return _ndjson(service.export_corpus())

    @app.get("/export/events")
    def export_events(moderator_id: str = Depends(require_moderator)):
        return _ndjson(service.export_events())

    @app.get("/export/votes")
    def export_votes(moderator_id: str = Depends(require_moderator)):
        return _ndjson(service.export_votes())

    @app.get("/export/decisions")
    def export_decisions(moderator_id: str = Depends(require_moderator)):
        return _ndjson(service.export_decisions())

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
