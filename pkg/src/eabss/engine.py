"""Chain-by-chain execution of a bound prompt script.

One session is strictly sequential.  The visible context imitates the
forgetful chat window: turns are appended, and once the word budget is
exceeded the oldest turns are dropped (they stay in the session log,
which is append-only and records every exchange and state change).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

from . import gateway as gw
from .errors import (
    GatewayError,
    InvalidInState,
    SilentModeFailure,
    StaticCheckFailed,
    UnknownKey,
)
from .patterns import refinement
from .script import (
    KeyRef,
    Memorise,
    PromptChain,
    ScriptDocument,
    errors_of,
    render_chain,
    static_check,
)

RUNNING = "running"
AWAITING_INTERVENTION = "awaiting_intervention"
AWAITING_ACK = "awaiting_ack"
FAILED = "failed"
COMPLETE = "complete"

DEFAULT_BUDGET_WORDS = 3000


@dataclass
class KeyRecord:
    key: str
    value: str
    version: int
    created_turn: int
    last_refreshed_turn: int
    unlabeled: bool = False


class KeyStore:
    """Versioned memorised keys; prior versions kept in an audit list."""

    def __init__(self):
        self.records: dict[str, KeyRecord] = {}
        self.audit: list[KeyRecord] = []

    def put(self, key: str, value: str, turn: int, unlabeled: bool = False) -> KeyRecord:
        old = self.records.get(key)
        if old is not None:
            self.audit.append(old)
            record = KeyRecord(key, value, old.version + 1, old.created_turn, turn, unlabeled)
        else:
            record = KeyRecord(key, value, 1, turn, turn)
            record.unlabeled = unlabeled
        self.records[key] = record
        return record

    def get(self, key: str) -> KeyRecord:
        if key not in self.records:
            raise UnknownKey(key)
        return self.records[key]

    def __contains__(self, key: str) -> bool:
        return key in self.records

    def __len__(self) -> int:
        return len(self.records)


class ConversationContext:
    """FIFO word-budget window over the visible turns."""

    def __init__(self, budget_words: int = DEFAULT_BUDGET_WORDS):
        self.turns: list[tuple[int, gw.ChatTurn]] = []  # (session turn index, turn)
        self.budget_words = budget_words
        self.evicted_count = 0
        self.oversize_turn: int | None = None

    @property
    def total_words(self) -> int:
        return sum(t.word_count for _, t in self.turns)

    def append(self, index: int, turn: gw.ChatTurn) -> list[int]:
        """Append and evict oldest-first; returns evicted turn indices."""
        self.turns.append((index, turn))
        return self.evict()

    def evict(self) -> list[int]:
        evicted = []
        while self.total_words > self.budget_words and len(self.turns) > 1:
            index, _ = self.turns.pop(0)
            evicted.append(index)
            self.evicted_count += 1
        self.oversize_turn = None
        if len(self.turns) == 1 and self.total_words > self.budget_words:
            self.oversize_turn = self.turns[0][0]
        return evicted

    def visible(self) -> tuple[gw.ChatTurn, ...]:
        return tuple(t for _, t in self.turns)

    def contains_text(self, needle: str) -> bool:
        return any(needle in t.text for _, t in self.turns)


@dataclass(frozen=True)
class SessionOptions:
    skip_co_creation: bool = False
    budget_words: int = DEFAULT_BUDGET_WORDS
    allow_partial: bool = False
    auto_approve: bool = False
    check_hashes: bool = False


@dataclass(frozen=True)
class InterventionAction:
    kind: str  # "approve" | "skip" | "refine" | "redirect"
    refinement_kind: str | None = None
    target: str = ""
    key: str | None = None
    prompt: str = ""


def approve() -> InterventionAction:
    return InterventionAction("approve")


def skip() -> InterventionAction:
    return InterventionAction("skip")


def refine(refinement_kind: str, target: str, key: str) -> InterventionAction:
    return InterventionAction("refine", refinement_kind=refinement_kind, target=target, key=key)


def redirect(prompt: str) -> InterventionAction:
    return InterventionAction("redirect", prompt=prompt)


class Session:
    """Execution state for one script run against one backend."""

    def __init__(self, doc: ScriptDocument, backend: gw.Backend,
                 params: gw.GenerationParams = gw.GenerationParams(),
                 options: SessionOptions = SessionOptions(),
                 log_path=None):
        diags = errors_of(static_check(doc), "KeyReadBeforeMemorise")
        if diags:
            raise StaticCheckFailed(diags)
        self.doc = doc
        self.backend = backend
        self.params = params
        self.options = options
        self.context = ConversationContext(options.budget_words)
        self.keys = KeyStore()
        self.status = RUNNING
        self.failure: Exception | None = None
        self.paused = False
        self.events: list[dict] = []
        self.transcript: list[gw.ChatTurn] = []
        self._chains = self._flatten(doc)
        self._cursor = 0
        self._approved = False
        self._log_path = log_path
        self._log_fh = open(log_path, "a", encoding="utf-8") if log_path else None

    @staticmethod
    def _flatten(doc: ScriptDocument):
        out = []
        for si, seg in enumerate(doc.segments):
            for ci, chain in enumerate(seg.chains):
                out.append((si, ci, chain))
        return out

    # -- observers ---------------------------------------------------------

    @property
    def cursor(self) -> tuple[int, int]:
        if self._cursor >= len(self._chains):
            return (len(self.doc.segments), 0)
        si, ci, _ = self._chains[self._cursor]
        return (si, ci)

    @property
    def current_chain(self) -> PromptChain | None:
        if self._cursor >= len(self._chains):
            return None
        return self._chains[self._cursor][2]

    @property
    def turn_count(self) -> int:
        return len(self.transcript)

    # -- event log ---------------------------------------------------------

    def _log(self, event: str, **payload):
        entry = {"event": event, **payload}
        self.events.append(entry)
        if self._log_fh:
            self._log_fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self._log_fh.flush()

    def _set_status(self, status: str):
        if status != self.status:
            self.status = status
            self._log("status_change", status=status)

    # -- turn plumbing -----------------------------------------------------

    def _append_turn(self, author: str, text: str) -> int:
        index = len(self.transcript)
        turn = gw.ChatTurn(author, text)
        self.transcript.append(turn)
        for evicted in self.context.append(index, turn):
            self._log("evicted", turn_index=evicted)
        return index

    def _exchange(self, prompt: str) -> str:
        self._append_turn(gw.USER, prompt)
        request = gw.ChatRequest(self.context.visible(), self.params)
        try:
            reply = gw.complete(self.backend, request)
        except GatewayError:
            self._set_status(FAILED)
            raise
        self._append_turn(gw.ASSISTANT, reply)
        return reply

    # -- main operations ---------------------------------------------------

    def step(self) -> "Session":
        if self.status != RUNNING:
            raise InvalidInState(f"cannot step while {self.status}")
        if self._cursor >= len(self._chains):
            self._set_status(COMPLETE)
            return self

        si, ci, chain = self._chains[self._cursor]
        if chain.optional and self.options.skip_co_creation:
            self._log("chain_skipped", segment=si, chain=ci)
            self._advance()
            return self
        if chain.intervene and not self._approved:
            self._set_status(AWAITING_INTERVENTION)
            return self
        self._approved = False

        prompt = render_chain(chain)
        self._log("chain_sent", segment=si, chain=ci, text=prompt)
        reply = self._exchange(prompt)
        self._log("reply_received", text=reply)

        if any(isinstance(d, Memorise) for d in chain.directives):
            self.extract_keys(chain, reply)

        if chain.ends_silent:
            self._set_status(AWAITING_ACK)
            if _is_ack(reply):
                self._set_status(RUNNING)
            else:
                self.failure = SilentModeFailure(f"expected yes, got {reply!r}")
                self._set_status(FAILED)
                return self

        self._advance()
        return self

    def _advance(self):
        self._cursor += 1
        if self._cursor >= len(self._chains):
            self._set_status(COMPLETE)

    def extract_keys(self, chain: PromptChain, reply: str):
        for d in chain.directives:
            if not isinstance(d, Memorise):
                continue
            value, labeled = _labeled_span(reply, d.key.name)
            if value is None:
                value, labeled = reply.strip(), False
            record = self.keys.put(d.key.name, value, self.turn_count - 1,
                                   unlabeled=not labeled)
            self._log("key_memorised", key=d.key.name, version=record.version,
                      unlabeled=record.unlabeled)

    def refresh_key(self, key: str) -> "Session":
        record = self.keys.get(key)
        self._exchange(f"List the memorised {key}.")
        record.last_refreshed_turn = self.turn_count - 1
        self._log("key_refreshed", key=key, version=record.version)
        return self

    def pause(self):
        if self.status != RUNNING:
            raise InvalidInState(f"cannot pause while {self.status}")
        self.paused = True
        self._set_status(AWAITING_INTERVENTION)

    def intervene(self, action: InterventionAction) -> "Session":
        if self.status != AWAITING_INTERVENTION:
            raise InvalidInState(f"cannot intervene while {self.status}")
        self._log("intervention", action=action.kind, key=action.key,
                  target=action.target or None)
        if action.kind == "approve":
            self._approved = not self.paused
            self.paused = False
            self._set_status(RUNNING)
        elif action.kind == "skip":
            self.paused = False
            self._set_status(RUNNING)
            if self.current_chain is not None:
                self._advance()
        elif action.kind == "refine":
            if action.key not in self.keys:
                raise UnknownKey(action.key)
            command = refinement(action.refinement_kind, action.target, action.key)
            reply = self._exchange(command.raw)
            self._log("reply_received", text=reply)
            value, labeled = _labeled_span(reply, action.key)
            if value is None:
                value, labeled = reply.strip(), False
            record = self.keys.put(action.key, value, self.turn_count - 1,
                                   unlabeled=not labeled)
            self._log("key_memorised", key=action.key, version=record.version,
                      unlabeled=record.unlabeled)
        elif action.kind == "redirect":
            reply = self._exchange(action.prompt)
            self._log("reply_received", text=reply)
        else:
            raise ValueError(f"unknown intervention: {action.kind}")
        return self

    def run(self) -> "Session":
        """Step to completion, auto-approving interventions when configured."""
        while self.status in (RUNNING, AWAITING_INTERVENTION):
            if self.status == AWAITING_INTERVENTION:
                if not self.options.auto_approve:
                    break
                self.intervene(approve())
            else:
                self.step()
        return self

    def close(self):
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None


# Label lines look like "Memorised Aim {key-aim}: ..." or just "key-aim: ...";
# the value is everything up to the next label line (any key) or reply end.
_ANY_LABEL_RE = re.compile(
    r"^(?:Memorised [^:{\n]*|[^\S\n]*)\{?key-[A-Za-z0-9_-]+\}?\**:", re.MULTILINE)


def _labeled_span(reply: str, key: str):
    label_re = re.compile(
        r"^(?:Memorised [^:{\n]*\s)?\**\{?" + re.escape(key) + r"\}?\**:[ \t]*",
        re.MULTILINE,
    )
    m = label_re.search(reply)
    if not m:
        return None, False
    rest = reply[m.end():]
    nxt = _ANY_LABEL_RE.search(rest)
    value = rest[:nxt.start()] if nxt else rest
    return value.strip(), True


def _is_ack(reply: str) -> bool:
    return re.sub(r"[^a-z]", "", reply.lower()) == "yes"


# ---------------------------------------------------------------------------
# Spec-shaped convenience wrappers


def start_session(doc: ScriptDocument, backend: gw.Backend,
                  params: gw.GenerationParams = gw.GenerationParams(),
                  options: SessionOptions = SessionOptions(),
                  log_path=None) -> Session:
    return Session(doc, backend, params, options, log_path)


def step(session: Session) -> Session:
    return session.step()


def intervene(session: Session, action: InterventionAction) -> Session:
    return session.intervene(action)


def refresh_key(session: Session, key: str) -> Session:
    return session.refresh_key(key)


def load_log(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
