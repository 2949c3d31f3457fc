"""Command-line front end.

Exit codes: 0 success, 1 domain failure, 2 usage error.  Progress goes
to stderr, machine-readable results to stdout.  The API credential is
read from the environment only (EABSS_API_KEY by default); there is
deliberately no flag for it.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import diagrams as dg, engine, gateway as gw, museum, report as report_mod
from .errors import EabssError
from .script import bind_case, parse_script
from .service import BUILTIN_SCRIPT, load_builtin_script, load_case_binding


def _info(message: str):
    print(message, file=sys.stderr)


def _load_script(path: str):
    if path == BUILTIN_SCRIPT:
        return load_builtin_script()
    with open(path, encoding="utf-8") as fh:
        return parse_script(fh.read())


def _add_session_args(p: argparse.ArgumentParser):
    p.add_argument("--script", required=True,
                   help=f"script file, or {BUILTIN_SCRIPT}")
    p.add_argument("--case", help="TOML case binding to apply")
    p.add_argument("--backend", choices=("scripted", "replay", "live"),
                   default="scripted")
    p.add_argument("--fixtures", help="JSONL fixture file (replay backend)")
    p.add_argument("--endpoint", help="chat completions URL (live backend)")
    p.add_argument("--record", help="record exchanges to this JSONL file")
    p.add_argument("--report", help="write the assembled report here")
    p.add_argument("--format", choices=report_mod.FORMATS, default="md")
    p.add_argument("--log", help="append session events to this JSONL log")
    p.add_argument("--skip-co-creation", action="store_true")
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--budget-words", type=int, default=engine.DEFAULT_BUDGET_WORDS)
    p.add_argument("--temperature", type=float, default=1.8)
    p.add_argument("--top-p", type=float, default=0.9)
    p.add_argument("--model", default="gpt-3.5-turbo")


def _make_backend(args) -> gw.Backend:
    if args.backend == "scripted":
        backend = museum.scripted_backend()
    elif args.backend == "replay":
        if not args.fixtures:
            raise UsageError("--backend replay needs --fixtures")
        backend = gw.ReplayBackend.from_file(args.fixtures)
    else:
        if not args.endpoint:
            raise UsageError("--backend live needs --endpoint")
        backend = gw.LiveBackend(args.endpoint)
    if args.record:
        backend = gw.RecordingBackend(backend)
    return backend


def _make_session(args, backend: gw.Backend, doc=None) -> engine.Session:
    if doc is None:
        doc = _load_script(args.script)
        if args.case:
            doc = bind_case(doc, load_case_binding(args.case))
    params = gw.GenerationParams(temperature=args.temperature, top_p=args.top_p,
                                 model_id=args.model)
    options = engine.SessionOptions(
        skip_co_creation=args.skip_co_creation,
        budget_words=args.budget_words,
        allow_partial=args.allow_partial,
        auto_approve=True,
    )
    return engine.Session(doc, backend, params, options, log_path=args.log)


class UsageError(Exception):
    pass


def _finish_session(args, session: engine.Session, backend: gw.Backend) -> int:
    if isinstance(backend, gw.RecordingBackend) and args.record:
        backend.save(args.record)
        _info(f"recorded {len(backend.exchanges)} exchanges to {args.record}")
    if session.status == engine.FAILED:
        _info(f"session failed: {session.failure}")
        return 1
    if session.status != engine.COMPLETE and not args.allow_partial:
        _info(f"session ended {session.status}; use --allow-partial for a report")
        return 1
    doc = report_mod.assemble_report(session, allow_partial=args.allow_partial,
                                     actors=museum.ACTORS)
    rendered = report_mod.export(doc, args.format)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(rendered)
        _info(f"report written to {args.report}")
    else:
        print(rendered)
    return 0


def cmd_bind(args) -> int:
    doc = _load_script(args.script)
    bound = bind_case(doc, load_case_binding(args.case))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(bound.source_text)
        _info(f"bound script written to {args.out}")
    else:
        print(bound.source_text)
    return 0


def cmd_run(args) -> int:
    backend = _make_backend(args)
    session = _make_session(args, backend)
    try:
        session.run()
    except EabssError as exc:
        _info(f"session failed: {exc}")
        if isinstance(backend, gw.RecordingBackend) and args.record:
            backend.save(args.record)
        return 1
    finally:
        session.close()
    return _finish_session(args, session, backend)


class _QueueBackend(gw.Backend):
    """Replays logged replies first, then hands over to a real backend."""

    def __init__(self, replies: list[str], fallback: gw.Backend):
        self.replies = list(replies)
        self.fallback = fallback

    def send(self, request: gw.ChatRequest) -> gw.BackendReply:
        if self.replies:
            return gw.BackendReply(self.replies.pop(0))
        return self.fallback.send(request)


def cmd_resume(args) -> int:
    entries = engine.load_log(args.resume_log)
    replies = [e["text"] for e in entries if e.get("event") == "reply_received"]
    _info(f"resuming: re-deriving state from {len(replies)} logged replies")
    backend = _QueueBackend(replies, _make_backend(args))
    session = _make_session(args, backend)
    try:
        session.run()
    except EabssError as exc:
        _info(f"session failed: {exc}")
        return 1
    finally:
        session.close()
    return _finish_session(args, session, backend.fallback)


def cmd_validate_diagram(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    d = dg.parse_diagram(args.kind, text)
    if args.repair:
        d, rep = dg.repair(d)
        with open(args.repair, "w", encoding="utf-8") as fh:
            fh.write(d.text + "\n")
        _info(f"applied {len(rep.applied)} repairs, wrote {args.repair}")
    diags = dg.validate(d)
    print(json.dumps([x.to_dict() for x in diags], indent=2))
    return 1 if dg.error_count(diags) else 0


def cmd_replay(args) -> int:
    args.backend, args.record = "replay", None
    backend = _make_backend(args)
    session = _make_session(args, backend)
    try:
        session.run()
    except EabssError as exc:
        _info(f"replay failed: {exc}")
        return 1
    finally:
        session.close()
    print(json.dumps({"status": session.status,
                      "turns": session.turn_count,
                      "keys": len(session.keys),
                      "events": len(session.events)}, indent=2))
    return 0 if session.status == engine.COMPLETE else 1


def cmd_export(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        doc = report_mod.import_json(fh.read())
    rendered = report_mod.export(doc, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
        _info(f"report written to {args.out}")
    else:
        print(rendered)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eabss")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bind", help="apply a case binding to a script")
    p.add_argument("--script", required=True)
    p.add_argument("--case", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bind)

    p = sub.add_parser("run", help="execute a script end to end")
    _add_session_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("resume", help="continue a session from its event log")
    _add_session_args(p)
    p.add_argument("--resume-log", required=True,
                   help="event log of the interrupted session")
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("validate-diagram", help="validate (and repair) a diagram")
    p.add_argument("--kind", required=True, choices=dg.KINDS)
    p.add_argument("--repair", help="write the repaired script here")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate_diagram)

    p = sub.add_parser("replay", help="verify a recorded fixture drives the script")
    _add_session_args(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("export", help="convert a JSON report to another format")
    p.add_argument("--format", choices=report_mod.FORMATS, default="md")
    p.add_argument("--out")
    p.add_argument("file")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        _info(f"usage error: {exc}")
        return 2
    except EabssError as exc:
        _info(f"error: {type(exc).__name__}: {exc}")
        return 1
    except OSError as exc:
        _info(f"i/o error: {exc}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
