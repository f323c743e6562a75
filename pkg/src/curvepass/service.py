"""Challenge-response authentication service.

Wraps the core protocol with enrollment, single-use challenge tickets,
degraded-image delivery, and session logging, and exposes it over HTTP+JSON:

    POST /api/enroll                      {user, image_ids[]}
    POST /api/challenge                   {user}
    GET  /api/challenge/{nonce}/image/{cell}
    GET  /api/catalog
    POST /api/verify                      {user, nonce, polyline[[x,y],...]}

Challenge payloads never include pass-image information; trace rejection
reasons are withheld unless ``service.debug_reasons`` is set (the generic
reject denies an attacker a verification oracle). Protocol-state errors
(unknown/expired/consumed nonce) are always reported: the client needs them
to recover, and they reveal nothing about the password.
"""

from __future__ import annotations

import base64
import secrets
import threading
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from pydantic import BaseModel

from .config import AppConfig
from .errors import (
    CellOutOfRange,
    CurvepassError,
    DuplicatePassImage,
    ExpiredNonce,
    UnknownImageId,
    UnknownNonce,
    WrongPasswordLength,
)
from .images import ImageCatalog, degrade_image, encode_png
from .scheme import (
    Decision,
    Password,
    Polyline,
    generate_challenge,
    map_polyline_to_cells,
    verify_trace,
)
from .stats import SessionRecord, append_session
from .store import ChallengeTicket, TicketStore, UserRecord, UserStore


class AuthService:
    """Transport-independent service core; the HTTP layer is a thin shim."""

    def __init__(self, config: AppConfig, catalog: ImageCatalog,
                 storage_dir: str | Path | None = None):
        if len(catalog) < config.grid.n_cells:
            raise ValueError(
                f"catalog has {len(catalog)} images; grid needs {config.grid.n_cells}"
            )
        self.config = config
        self.catalog = catalog
        # the challenge pool is the first n_cells catalog images, stable order
        self.pool_ids = catalog.ids[: config.grid.n_cells]
        root = Path(storage_dir if storage_dir is not None else config.storage_dir)
        self.users = UserStore(root / "users.jsonl")
        self.tickets = TicketStore(root / "tickets.jsonl")
        self.session_log = root / "sessions.csv"
        self._attempts: dict[str, int] = {}
        self._attempts_lock = threading.Lock()

    # -- enrollment --------------------------------------------------------

    def enroll(self, user: str, image_ids: Sequence[str]) -> tuple[UserRecord, dict]:
        """Persist a pending enrollment and issue its confirmation challenge."""
        ids = tuple(image_ids)
        if len(ids) != self.config.password_length:
            raise WrongPasswordLength(
                f"expected {self.config.password_length} pass-images, got {len(ids)}"
            )
        unknown = [i for i in ids if i not in self.catalog.entries or i not in self.pool_ids]
        if unknown:
            raise UnknownImageId(", ".join(unknown))
        if len(set(ids)) != len(ids):
            raise DuplicatePassImage("pass-images must be distinct")
        record = self.users.add(user, ids)
        return record, self.issue_challenge(user)

    # -- challenges ---------------------------------------------------------

    def issue_challenge(self, user: str) -> dict:
        """Create, persist, and return a fresh challenge payload for the user.

        The payload carries everything the client needs to render and draw,
        and nothing about the password.
        """
        record = self.users.get(user)
        password = Password(record.pass_image_ids)
        challenge = generate_challenge(
            password,
            self.pool_ids,
            self.config.grid,
            config=self.config.challenge_config,
            seed=secrets.randbits(64),
        )
        self.tickets.issue(ChallengeTicket(challenge=challenge, user=user))
        return {
            "nonce": challenge.nonce,
            "grid": {"cols": challenge.grid.cols, "rows": challenge.grid.rows},
            "cells": list(challenge.layout.cell_to_image),
            "head_cell": challenge.head_cell,
            "tail_cell": challenge.tail_cell,
            "max_len": challenge.max_len,
            "expires_at": challenge.expires_at,
        }

    # -- verification -------------------------------------------------------

    def verify_submission(self, user: str, nonce: str,
                          points: Sequence[Sequence[float]]) -> Decision:
        """Evaluate one drawn submission against its challenge ticket.

        The ticket is atomically marked consumed before evaluation, so a
        nonce can never be evaluated twice no matter how calls interleave.
        A successful draw on a pending user's confirmation challenge
        activates the account.
        """
        record = self.users.get(user)
        ticket = self.tickets.get(nonce)
        if ticket.user != user:
            # don't reveal that the nonce exists for someone else
            raise UnknownNonce(nonce)
        ticket = self.tickets.consume(nonce)
        polyline = Polyline(tuple((p[0], p[1]) for p in points))
        trace = map_polyline_to_cells(polyline, ticket.challenge.grid)
        decision = verify_trace(ticket.challenge, Password(record.pass_image_ids), trace)
        if decision.accepted and record.state == "pending_confirmation":
            self.users.activate(user)
        self._log_session(user, ticket, decision)
        return decision

    def _log_session(self, user: str, ticket: ChallengeTicket, decision: Decision) -> None:
        with self._attempts_lock:
            trial = self._attempts.get(user, 0) + 1
            self._attempts[user] = trial
        issued_at = ticket.challenge.expires_at - self.config.ttl_seconds
        duration = max(time.time() - issued_at, 1e-3)
        try:
            append_session(self.session_log, SessionRecord(
                user=user, scheme="curvepass", trial=trial,
                success=decision.accepted, duration=duration,
                timestamp=datetime.now(timezone.utc),
            ))
        except OSError:
            pass  # logging must never break authentication

    # -- images -------------------------------------------------------------

    def get_challenge_image(self, nonce: str, cell: int) -> bytes:
        """Serve the degraded raster for one challenge cell, deterministically."""
        ticket = self.tickets.get(nonce)
        if ticket.challenge.expires_at < time.time():
            raise ExpiredNonce(nonce)
        if not ticket.challenge.grid.contains(cell):
            raise CellOutOfRange(f"cell {cell} outside grid")
        image_id = ticket.challenge.layout.image_at(cell)
        raster = degrade_image(self.catalog.raster(image_id), ticket.challenge.degrade)
        return encode_png(raster)

    def catalog_payload(self) -> dict:
        """Full-quality thumbnails for the enrollment picker."""
        return {
            "width": self.catalog.width,
            "height": self.catalog.height,
            "images": [
                {
                    "id": iid,
                    "png_base64": base64.b64encode(
                        encode_png(self.catalog.raster(iid))
                    ).decode("ascii"),
                }
                for iid in self.pool_ids
            ],
        }


# --- HTTP layer -------------------------------------------------------------

_STATUS_BY_REASON = {
    "DuplicateUser": 409,
    "WrongPasswordLength": 422,
    "UnknownImageId": 422,
    "DuplicatePassImage": 422,
    "UnknownUser": 404,
    "UnknownNonce": 404,
    "ExpiredNonce": 410,
    "ConsumedNonce": 409,
    "CellOutOfRange": 404,
    "EmptyPolyline": 422,
}


class EnrollRequest(BaseModel):
    user: str
    image_ids: list[str]


class ChallengeRequest(BaseModel):
    user: str


class VerifyRequest(BaseModel):
    user: str
    nonce: str
    polyline: list[tuple[float, float]]


def create_app(service: AuthService):
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse, Response

    app = FastAPI(title="curvepass", version="0.1.0")

    @app.exception_handler(CurvepassError)
    async def domain_error(request: Request, exc: CurvepassError):
        reason = exc.reason
        return JSONResponse(
            status_code=_STATUS_BY_REASON.get(reason, 400),
            content={"result": "error", "reason": reason},
        )

    @app.post("/api/enroll")
    def enroll(req: EnrollRequest):
        record, challenge = service.enroll(req.user, req.image_ids)
        return {"user": record.user, "state": record.state, "challenge": challenge}

    @app.post("/api/challenge")
    def challenge(req: ChallengeRequest):
        return service.issue_challenge(req.user)

    @app.get("/api/challenge/{nonce}/image/{cell}")
    def challenge_image(nonce: str, cell: int):
        png = service.get_challenge_image(nonce, cell)
        return Response(content=png, media_type="image/png")

    @app.get("/api/catalog")
    def catalog():
        return service.catalog_payload()

    @app.post("/api/verify")
    def verify(req: VerifyRequest):
        decision = service.verify_submission(req.user, req.nonce, req.polyline)
        if decision.accepted:
            return {"result": "accepted"}
        body = {"result": "rejected"}
        if service.config.debug_reasons:
            body["reason"] = decision.reason.value
        return body

    if service.config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=service.config.static_dir, html=True),
                  name="ui")

    return app
