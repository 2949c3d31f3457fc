"""HTTP/JSON facade over running sessions for the steering dashboard.

Every state change visible through the API corresponds to one session
event in the append-only log; the event stream is that log.  Sessions
created here always start paused so a human confirms the first chain.
"""

from __future__ import annotations

import threading
import time
import uuid

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from importlib import resources

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response, StreamingResponse

from . import engine, gateway as gw, museum, report as report_mod
from .errors import EabssError, InvalidInState, UnknownKey
from .script import CaseBinding, ScriptDocument, bind_case, parse_script

BUILTIN_SCRIPT = "builtin:museum"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class SessionRuntime:
    id: str
    created_at: float
    session: engine.Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    driver: threading.Thread | None = None
    pause_requested: bool = False

    def snapshot(self) -> dict:
        s = self.session
        return {
            "id": self.id,
            "created_at": self.created_at,
            "status": s.status,
            "cursor": list(s.cursor),
            "turn_count": s.turn_count,
            "event_count": len(s.events),
            "failure": str(s.failure) if s.failure else None,
            "pending_chain": s.current_chain.raw_text if s.current_chain else None,
        }


def load_builtin_script() -> ScriptDocument:
    text = resources.files("eabss.data").joinpath(
        "adaptive_architecture.txt").read_text(encoding="utf-8")
    return parse_script(text)


def _load_script(ref: str) -> ScriptDocument:
    if ref == BUILTIN_SCRIPT:
        return load_builtin_script()
    try:
        with open(ref, encoding="utf-8") as fh:
            return parse_script(fh.read())
    except OSError as exc:
        raise ApiError(400, "bad_script", f"cannot read script: {exc}")


def load_case_binding(path: str) -> CaseBinding:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    try:
        return CaseBinding(data["topic"], data["research_design"],
                           data["domain"], data["specialisation"])
    except KeyError as exc:
        raise ApiError(400, "bad_case", f"case binding missing field {exc}")


def _make_backend(body: dict) -> gw.Backend:
    kind = body.get("backend", "scripted")
    if kind == "scripted":
        return museum.scripted_backend()
    if kind == "replay":
        fixtures = body.get("fixtures")
        if not fixtures:
            raise ApiError(400, "bad_backend", "replay backend needs 'fixtures'")
        try:
            return gw.ReplayBackend.from_file(fixtures,
                                              body.get("check_hashes", False))
        except OSError as exc:
            raise ApiError(400, "bad_backend", f"cannot read fixtures: {exc}")
    if kind == "live":
        endpoint = body.get("endpoint")
        if not endpoint:
            raise ApiError(400, "bad_backend", "live backend needs 'endpoint'")
        return gw.LiveBackend(endpoint,
                              body.get("credential_env", "EABSS_API_KEY"))
    raise ApiError(400, "bad_backend", f"unknown backend {kind!r}")


def _make_params(body: dict) -> gw.GenerationParams:
    p = body.get("params") or {}
    try:
        return gw.GenerationParams(
            temperature=p.get("temperature", 1.8),
            top_p=p.get("top_p", 0.9),
            model_id=p.get("model", "gpt-3.5-turbo"),
        )
    except ValueError as exc:
        raise ApiError(400, "bad_params", str(exc))


class SessionStore:
    def __init__(self):
        self.sessions: dict[str, SessionRuntime] = {}
        self.tokens: dict[str, str] = {}
        self.lock = threading.Lock()

    def create(self, body: dict) -> SessionRuntime:
        token = body.get("idempotency_token")
        with self.lock:
            if token and token in self.tokens:
                raise ApiError(409, "duplicate_token",
                               f"token already used for session {self.tokens[token]}")
        script_ref = body.get("script")
        if not script_ref:
            raise ApiError(400, "missing_script", "body needs a 'script' reference")
        doc = _load_script(script_ref)
        if body.get("case"):
            doc = bind_case(doc, load_case_binding(body["case"]))
        backend = _make_backend(body)
        params = _make_params(body)
        opts = body.get("options") or {}
        options = engine.SessionOptions(
            skip_co_creation=bool(opts.get("skip_co_creation", False)),
            budget_words=int(opts.get("budget_words", engine.DEFAULT_BUDGET_WORDS)),
            allow_partial=bool(opts.get("allow_partial", False)),
        )
        try:
            session = engine.Session(doc, backend, params, options,
                                     log_path=body.get("log_path"))
        except EabssError as exc:
            raise ApiError(400, "bad_session", str(exc))
        session.pause()  # service sessions start awaiting human confirmation
        rt = SessionRuntime(uuid.uuid4().hex, time.time(), session)
        with self.lock:
            self.sessions[rt.id] = rt
            if token:
                self.tokens[token] = rt.id
        return rt

    def get(self, session_id: str) -> SessionRuntime:
        rt = self.sessions.get(session_id)
        if rt is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return rt


def _drive(rt: SessionRuntime):
    """Step until the session needs a human again (or finishes)."""
    while True:
        with rt.lock:
            if rt.pause_requested:
                rt.pause_requested = False
                if rt.session.status == engine.RUNNING:
                    rt.session.pause()
                break
            if rt.session.status != engine.RUNNING:
                break
            try:
                rt.session.step()
            except EabssError:
                break  # session is already marked failed


def _kick(rt: SessionRuntime):
    if rt.driver is None or not rt.driver.is_alive():
        rt.driver = threading.Thread(target=_drive, args=(rt,), daemon=True)
        rt.driver.start()


def create_app() -> FastAPI:
    app = FastAPI(title="eabss session service")
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse({"code": exc.code, "message": exc.message},
                            status_code=exc.status)

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        rt = store.create(body)
        return rt.snapshot()

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return store.get(session_id).snapshot()

    @app.get("/sessions/{session_id}/events")
    async def get_events(session_id: str, request: Request, after: int = -1):
        rt = store.get(session_id)
        last_id = request.headers.get("last-event-id")
        if last_id is not None:
            try:
                after = int(last_id)
            except ValueError:
                raise ApiError(400, "bad_last_event_id", last_id)
        if "text/event-stream" in request.headers.get("accept", ""):
            return StreamingResponse(_sse(rt, after),
                                     media_type="text/event-stream")
        events = rt.session.events[after + 1:]
        return {"events": [{"index": after + 1 + i, **e}
                           for i, e in enumerate(events)],
                "next": after + len(events) + 1,
                "status": rt.session.status}

    def _sse(rt: SessionRuntime, after: int):
        import json as _json

        cursor = after + 1
        idle = 0.0
        while True:
            events = rt.session.events
            while cursor < len(events):
                payload = _json.dumps(events[cursor], ensure_ascii=False)
                yield f"id: {cursor}\nevent: {events[cursor]['event']}\ndata: {payload}\n\n"
                cursor += 1
                idle = 0.0
            if rt.session.status in (engine.COMPLETE, engine.FAILED) and cursor >= len(rt.session.events):
                break
            time.sleep(0.05)
            idle += 0.05
            if idle > 30:
                yield ": keep-alive\n\n"
                idle = 0.0

    @app.get("/sessions/{session_id}/keys")
    async def get_keys(session_id: str):
        rt = store.get(session_id)
        s = rt.session
        out = []
        for record in s.keys.records.values():
            out.append({
                "key": record.key,
                "value": record.value,
                "version": record.version,
                "unlabeled": record.unlabeled,
                "created_turn": record.created_turn,
                "last_refreshed_turn": record.last_refreshed_turn,
                "staleness": s.turn_count - 1 - record.last_refreshed_turn,
            })
        return {"keys": out}

    @app.get("/sessions/{session_id}/report")
    async def get_report(session_id: str, format: str = "json"):
        rt = store.get(session_id)
        if format not in report_mod.FORMATS:
            raise ApiError(400, "unknown_format", format)
        with rt.lock:
            doc = report_mod.assemble_report(rt.session, allow_partial=True,
                                             actors=museum.ACTORS)
        rendered = report_mod.export(doc, format)
        if format == "md":
            return PlainTextResponse(rendered, media_type="text/markdown")
        return Response(rendered, media_type="application/json")

    @app.post("/sessions/{session_id}/intervene")
    async def intervene(session_id: str, body: dict):
        rt = store.get(session_id)
        action = engine.InterventionAction(
            kind=body.get("action", ""),
            refinement_kind=body.get("refinement_kind"),
            target=body.get("target", ""),
            key=body.get("key"),
            prompt=body.get("prompt", ""),
        )
        with rt.lock:
            try:
                rt.session.intervene(action)
            except InvalidInState as exc:
                raise ApiError(409, "invalid_in_state", str(exc))
            except UnknownKey as exc:
                raise ApiError(404, "unknown_key", str(exc))
            except (EabssError, ValueError) as exc:
                raise ApiError(400, "bad_action", str(exc))
            versions = {k: r.version for k, r in rt.session.keys.records.items()}
        if rt.session.status == engine.RUNNING:
            _kick(rt)
        return {"status": rt.session.status, "key_versions": versions}

    @app.post("/sessions/{session_id}/pause")
    async def pause(session_id: str):
        rt = store.get(session_id)
        with rt.lock:
            if rt.session.status == engine.AWAITING_INTERVENTION:
                raise ApiError(409, "invalid_in_state", "session already paused")
            if rt.session.status in (engine.COMPLETE, engine.FAILED):
                raise ApiError(409, "invalid_in_state",
                               f"cannot pause a {rt.session.status} session")
            rt.pause_requested = True
        if rt.driver is None or not rt.driver.is_alive():
            with rt.lock:
                if rt.pause_requested and rt.session.status == engine.RUNNING:
                    rt.session.pause()
                    rt.pause_requested = False
        return {"status": rt.session.status}

    return app
