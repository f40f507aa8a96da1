"""Local HTTP JSON service hosting live audit sessions.

Each session is backed by an append-only JSON Lines event log with a chained
checksum, and the in-memory audit state is always exactly the deterministic
replay of that log.  Committed ballot events are immutable: there is no undo,
because the supermartingale guarantee applies to the actually observed stream.

Non-finite log values are serialised as the strings "Infinity"/"-Infinity"
(strict JSON has no float infinities).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .alpha import AlphaConfig
from .engine import (AuditConfig, AuditState, Decision, WeightScheme,
                     audit_new, audit_observe, audit_status, tune_from_cvrs)
from .requirements import build_pool
from .tabulation import enumerate_alt_orders

__all__ = ["SessionStore", "create_app"]


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        if math.isnan(v):
            return "NaN"
        return "Infinity" if v > 0 else "-Infinity"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _canonical(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _chain(prev_checksum: str, record: dict) -> str:
    h = hashlib.sha256()
    h.update(prev_checksum.encode())
    h.update(_canonical(record).encode())
    return h.hexdigest()


def parse_audit_config(raw: dict) -> AuditConfig:
    try:
        scheme = WeightScheme(raw.get("scheme", "largest"))
    except ValueError:
        raise HTTPException(400, f"unknown weighting scheme {raw.get('scheme')!r}")
    try:
        return AuditConfig(
            alpha=float(raw.get("alpha", 0.05)),
            scheme=scheme,
            update_every=int(raw.get("update_every", 25)),
            alpha_config=AlphaConfig(
                eta0=float(raw.get("eta0", 0.52)),
                d=int(raw.get("d", 50)),
                mu0=float(raw.get("mu0", 0.5)),
            ),
        )
    except (ValueError, TypeError) as exc:
        raise HTTPException(400, str(exc))


class Session:
    """One live audit plus its event log."""

    def __init__(self, session_id: str, path: Path, roster: list[str],
                 B: int, reported_winner: str, config: AuditConfig,
                 cvrs, created_at: float):
        self.id = session_id
        self.path = path
        self.roster = roster
        self.reported_winner = reported_winner
        self.config = config
        self.created_at = created_at
        self.lock = threading.Lock()
        self.last_checksum = ""
        self.seq = 0

        C = len(roster)
        winner_id = roster.index(reported_winner)
        alt_orders = enumerate_alt_orders(C, winner_id, config.max_candidates)
        pool = build_pool(alt_orders)
        tuning = None
        if cvrs:
            tuning = tune_from_cvrs(cvrs, pool, alt_orders, config)
        self.audit: AuditState = audit_new(pool, alt_orders, B, config, tuning)

    def name_to_id(self, name: str) -> int:
        try:
            return self.roster.index(name)
        except ValueError:
            raise HTTPException(400, f"unknown candidate {name!r}")

    def append_event(self, kind: str, payload: dict) -> None:
        self.seq += 1
        record = {"seq": self.seq, "kind": kind, "payload": payload}
        record["checksum"] = self.last_checksum = _chain(self.last_checksum, record)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())

    def status_body(self) -> dict:
        st = audit_status(self.audit)
        body = st.to_dict()
        body["session_id"] = self.id
        body["created_at"] = self.created_at
        body["B"] = self.audit.B
        body["roster"] = self.roster
        body["reported_winner"] = self.reported_winner
        return _jsonable(body)

    def submit(self, ranking_names: list[str]) -> dict:
        with self.lock:
            if self.audit.decision is not Decision.ONGOING:
                raise HTTPException(409, "session closed: "
                                    + self.audit.decision.value)
            if len(set(ranking_names)) != len(ranking_names):
                raise HTTPException(400, "duplicate candidate in ranking")
            ballot = tuple(self.name_to_id(n) for n in ranking_names)
            audit_observe(self.audit, ballot)
            self.append_event("BallotEntered",
                              {"t": self.audit.t, "ranking": list(ballot)})
            if (self.audit.decision is Decision.ONGOING
                    and self.audit.t % self.config.update_every == 0):
                self.append_event("WeightsUpdated", {"t": self.audit.t})
            if self.audit.decision is not Decision.ONGOING:
                self.append_event("Decision",
                                  {"t": self.audit.t,
                                   "decision": self.audit.decision.value})
            return self.status_body()


class SessionStore:
    """Sessions persisted as <data_dir>/<id>.jsonl, replayable after a crash."""

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, request: dict) -> Session:
        manifest = request.get("ballot_manifest") or {}
        roster = manifest.get("roster")
        B = manifest.get("B")
        if not roster or not isinstance(roster, list):
            raise HTTPException(400, "ballot_manifest.roster is required")
        if len(set(roster)) != len(roster):
            raise HTTPException(400, "duplicate candidate names in roster")
        if not isinstance(B, int) or B < 1:
            raise HTTPException(400, "ballot_manifest.B must be a positive integer")
        reported_winner = request.get("reported_winner")
        if reported_winner not in roster:
            raise HTTPException(400, f"reported winner {reported_winner!r} "
                                "is not in the roster")
        config = parse_audit_config(request.get("config") or {})
        cvrs = None
        if request.get("cvrs"):
            cvrs = []
            for row in request["cvrs"]:
                for name in row:
                    if name not in roster:
                        raise HTTPException(400, f"CVR names unknown candidate {name!r}")
                cvrs.append(tuple(roster.index(n) for n in row))

        session_id = uuid.uuid4().hex[:12]
        path = self.data_dir / f"{session_id}.jsonl"
        session = Session(session_id, path, list(roster), B, reported_winner,
                          config, cvrs, created_at=time.time())
        header = {
            "seq": 0,
            "kind": "Header",
            "payload": {
                "roster": roster,
                "B": B,
                "reported_winner": reported_winner,
                "config": {
                    "alpha": config.alpha,
                    "scheme": config.scheme.value,
                    "update_every": config.update_every,
                    "eta0": config.alpha_config.eta0,
                    "d": config.alpha_config.d,
                    "mu0": config.alpha_config.mu0,
                },
                "cvrs": [list(c) for c in cvrs] if cvrs else None,
                "created_at": session.created_at,
            },
        }
        header["checksum"] = session.last_checksum = _chain("", header)
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(header, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        path = self.data_dir / f"{session_id}.jsonl"
        if not path.exists():
            raise HTTPException(404, f"unknown session {session_id!r}")
        session = self._replay(session_id, path)
        with self._lock:
            self._sessions.setdefault(session_id, session)
            return self._sessions[session_id]

    def _replay(self, session_id: str, path: Path) -> Session:
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            raise HTTPException(500, f"empty event log for {session_id}")
        records = [json.loads(line) for line in lines]
        checksum = ""
        for rec in records:
            claimed = rec["checksum"]
            expect = _chain(checksum, {"seq": rec["seq"], "kind": rec["kind"],
                                       "payload": rec["payload"]})
            if expect != claimed:
                raise HTTPException(500, f"checksum chain broken at seq {rec['seq']}")
            checksum = claimed
        header = records[0]
        if header["kind"] != "Header":
            raise HTTPException(500, "event log missing header")
        p = header["payload"]
        config = parse_audit_config(p["config"])
        cvrs = [tuple(c) for c in p["cvrs"]] if p.get("cvrs") else None
        session = Session(session_id, path, list(p["roster"]), p["B"],
                          p["reported_winner"], config, cvrs,
                          created_at=p["created_at"])
        for rec in records[1:]:
            session.seq = rec["seq"]
            session.last_checksum = rec["checksum"]
            if rec["kind"] == "BallotEntered":
                audit_observe(session.audit, tuple(rec["payload"]["ranking"]))
        return session


def create_app(data_dir, static_dir=None) -> FastAPI:
    """App over one data directory; binds are the caller's business (the CLI
    defaults to loopback).  static_dir, if given, is served at / for the UI."""
    app = FastAPI(title="awaire audit service")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.post("/sessions")
    def create_session(request: dict):
        session = store.create(request)
        return {"session_id": session.id, "status": session.status_body()}

    @app.get("/sessions/{session_id}")
    def session_status(session_id: str):
        return store.get(session_id).status_body()

    @app.post("/sessions/{session_id}/ballots")
    def submit_ballot(session_id: str, body: dict):
        session = store.get(session_id)
        ranking = body.get("ranking")
        if ranking is None or not isinstance(ranking, list):
            raise HTTPException(400, "body must contain a 'ranking' list")
        return session.submit([str(n) for n in ranking])

    @app.get("/sessions/{session_id}/log")
    def session_log(session_id: str):
        session = store.get(session_id)
        return PlainTextResponse(session.path.read_text(encoding="utf-8"),
                                 media_type="application/jsonl")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
