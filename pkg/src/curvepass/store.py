"""Persistence for enrollments and challenge tickets.

Both stores are append-only JSONL event logs replayed at startup, so a
service restart preserves enrolled users, unexpired tickets, and consumed
flags without any external database. Writes happen under a lock and are
flushed line-by-line; the ticket store's consume operation is an atomic
check-and-set, which is what makes challenge nonces single-use even under
concurrent verification attempts.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConsumedNonce, DuplicateUser, ExpiredNonce, UnknownNonce, UnknownUser
from .images import DegradeParams
from .scheme import Challenge, GridSpec, Layout


@dataclass(frozen=True)
class UserRecord:
    user: str
    pass_image_ids: tuple[str, ...]
    state: str  # "pending_confirmation" | "active"
    created_at: float


@dataclass(frozen=True)
class ChallengeTicket:
    challenge: Challenge
    user: str
    consumed: bool = False


def _challenge_to_dict(ch: Challenge) -> dict:
    return {
        "nonce": ch.nonce,
        "cols": ch.grid.cols,
        "rows": ch.grid.rows,
        "layout": list(ch.layout.cell_to_image),
        "head_cell": ch.head_cell,
        "tail_cell": ch.tail_cell,
        "max_len": ch.max_len,
        "alpha": ch.degrade.alpha,
        "beta": ch.degrade.beta,
        "expires_at": ch.expires_at,
    }


def _challenge_from_dict(d: dict) -> Challenge:
    return Challenge(
        nonce=d["nonce"],
        grid=GridSpec(cols=d["cols"], rows=d["rows"]),
        layout=Layout(cell_to_image=tuple(d["layout"])),
        head_cell=d["head_cell"],
        tail_cell=d["tail_cell"],
        max_len=d["max_len"],
        degrade=DegradeParams(alpha=d["alpha"], beta=d["beta"]),
        expires_at=d["expires_at"],
    )


class UserStore:
    """User records, keyed by user id; the only state transition is
    pending_confirmation -> active."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._users: dict[str, UserRecord] = {}
        self._replay()

    def _replay(self) -> None:
        if not self._path.exists():
            return
        with self._path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "enroll":
                    self._users[event["user"]] = UserRecord(
                        user=event["user"],
                        pass_image_ids=tuple(event["pass_image_ids"]),
                        state=event["state"],
                        created_at=event["created_at"],
                    )
                elif event["event"] == "activate":
                    rec = self._users[event["user"]]
                    self._users[event["user"]] = replace(rec, state="active")

    def _append(self, event: dict) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with self._path.open("a") as fh:
            fh.write(json.dumps(event) + "\n")
            fh.flush()

    def add(self, user: str, pass_image_ids: tuple[str, ...]) -> UserRecord:
        with self._lock:
            if user in self._users:
                raise DuplicateUser(user)
            record = UserRecord(
                user=user,
                pass_image_ids=pass_image_ids,
                state="pending_confirmation",
                created_at=time.time(),
            )
            self._append({
                "event": "enroll",
                "user": user,
                "pass_image_ids": list(pass_image_ids),
                "state": record.state,
                "created_at": record.created_at,
            })
            self._users[user] = record
            return record

    def activate(self, user: str) -> UserRecord:
        with self._lock:
            rec = self._users.get(user)
            if rec is None:
                raise UnknownUser(user)
            if rec.state != "active":
                self._append({"event": "activate", "user": user})
                rec = replace(rec, state="active")
                self._users[user] = rec
            return rec

    def get(self, user: str) -> UserRecord:
        with self._lock:
            rec = self._users.get(user)
            if rec is None:
                raise UnknownUser(user)
            return rec


class TicketStore:
    """Challenge tickets with atomic single-use consumption.

    ``consume`` performs the whole consumed/expired/mark sequence under the
    lock: for any interleaving of concurrent calls on one nonce, exactly one
    caller gets the ticket back, all others get ConsumedNonce. Expired
    submissions never consume. Expired tickets are garbage-collected lazily.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._tickets: dict[str, ChallengeTicket] = {}
        self._replay()

    def _replay(self) -> None:
        if not self._path.exists():
            return
        with self._path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "issue":
                    ticket = ChallengeTicket(
                        challenge=_challenge_from_dict(event["challenge"]),
                        user=event["user"],
                    )
                    self._tickets[ticket.challenge.nonce] = ticket
                elif event["event"] == "consume":
                    rec = self._tickets.get(event["nonce"])
                    if rec is not None:
                        self._tickets[event["nonce"]] = replace(rec, consumed=True)

    def _append(self, event: dict) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with self._path.open("a") as fh:
            fh.write(json.dumps(event) + "\n")
            fh.flush()

    def _gc(self, now: float) -> None:
        # drop long-expired consumed/unconsumed tickets from memory only;
        # the log keeps history and replay re-drops them on restart
        stale = [n for n, t in self._tickets.items()
                 if t.challenge.expires_at + 3600 < now]
        for nonce in stale:
            del self._tickets[nonce]

    def issue(self, ticket: ChallengeTicket) -> None:
        with self._lock:
            self._gc(time.time())
            self._append({
                "event": "issue",
                "user": ticket.user,
                "challenge": _challenge_to_dict(ticket.challenge),
            })
            self._tickets[ticket.challenge.nonce] = ticket

    def get(self, nonce: str) -> ChallengeTicket:
        with self._lock:
            ticket = self._tickets.get(nonce)
            if ticket is None:
                raise UnknownNonce(nonce)
            return ticket

    def consume(self, nonce: str, now: float | None = None) -> ChallengeTicket:
        """Atomically claim the ticket for evaluation.

        Raises UnknownNonce / ConsumedNonce / ExpiredNonce; on success the
        ticket is marked consumed (persistently) before it is returned, so
        a nonce yields at most one evaluation ever.
        """
        now = time.time() if now is None else now
        with self._lock:
            ticket = self._tickets.get(nonce)
            if ticket is None:
                raise UnknownNonce(nonce)
            if ticket.consumed:
                raise ConsumedNonce(nonce)
            if ticket.challenge.expires_at < now:
                raise ExpiredNonce(nonce)
            self._append({"event": "consume", "nonce": nonce})
            consumed = replace(ticket, consumed=True)
            self._tickets[nonce] = consumed
            return consumed
