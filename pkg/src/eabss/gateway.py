"""Chat-completion backends: live HTTP, deterministic replay, scripted mock.

The gateway is stateless per request: callers assemble the visible
context themselves and pass the full turn list every time.  Backends
return the raw reply plus a truncation flag; ``complete`` resolves
truncation by issuing "continue" follow-ups.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field, replace

from .errors import (
    AuthFailure,
    NetworkFailure,
    RateLimited,
    ReplayMismatch,
    TruncationUnresolved,
)

USER = "user"
ASSISTANT = "assistant"
SYSTEM = "system"


def count_words(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 1.8
    top_p: float = 0.9
    model_id: str = "gpt-3.5-turbo"
    max_continuations: int = 3

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p out of range: {self.top_p}")
        if self.max_continuations < 0:
            raise ValueError("max_continuations must be >= 0")


@dataclass(frozen=True)
class ChatTurn:
    author: str  # USER | ASSISTANT | SYSTEM
    text: str

    def __post_init__(self):
        if self.author not in (USER, ASSISTANT, SYSTEM):
            raise ValueError(f"unknown author: {self.author}")

    @property
    def word_count(self) -> int:
        return count_words(self.text)


@dataclass(frozen=True)
class ChatRequest:
    turns: tuple[ChatTurn, ...]
    params: GenerationParams = GenerationParams()

    def __post_init__(self):
        if not self.turns:
            raise ValueError("request needs at least one turn")
        if self.turns[-1].author != USER:
            raise ValueError("last turn must be authored by the user")

    def messages(self) -> list[dict]:
        return [{"role": t.author, "content": t.text} for t in self.turns]


def request_hash(request: ChatRequest) -> str:
    payload = json.dumps(request.messages(), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class BackendReply:
    text: str
    truncated: bool = False


@dataclass(frozen=True)
class Exchange:
    index: int
    request_hash: str
    reply: str


class Backend:
    """Interface: one request in, one (possibly truncated) reply out."""

    def send(self, request: ChatRequest) -> BackendReply:  # pragma: no cover
        raise NotImplementedError


def complete(backend: Backend, request: ChatRequest) -> str:
    """Full reply text, following up with "continue" while truncated."""
    reply = backend.send(request)
    parts = [reply.text]
    turns = request.turns
    continuations = 0
    while reply.truncated:
        if continuations >= request.params.max_continuations:
            raise TruncationUnresolved(
                f"reply still truncated after {continuations} continuations")
        turns = turns + (ChatTurn(ASSISTANT, reply.text), ChatTurn(USER, "continue"))
        reply = backend.send(replace(request, turns=turns))
        parts.append(reply.text)
        continuations += 1
    return "".join(parts)


# ---------------------------------------------------------------------------
# Replay


class ReplayBackend(Backend):
    """Deterministic playback of a recorded fixture, in order."""

    def __init__(self, exchanges: list[Exchange], check_hashes: bool = False):
        self.exchanges = list(exchanges)
        self.check_hashes = check_hashes
        self.cursor = 0

    @classmethod
    def from_file(cls, path, check_hashes: bool = False) -> "ReplayBackend":
        return cls(load_fixture(path), check_hashes)

    def send(self, request: ChatRequest) -> BackendReply:
        if self.cursor >= len(self.exchanges):
            raise ReplayMismatch(self.cursor, "fixture exhausted")
        ex = self.exchanges[self.cursor]
        if ex.index != self.cursor:
            raise ReplayMismatch(self.cursor, f"fixture entry has index {ex.index}")
        if self.check_hashes and ex.request_hash != request_hash(request):
            raise ReplayMismatch(self.cursor, "request hash differs from recording")
        self.cursor += 1
        return BackendReply(ex.reply)


def record_fixture(exchanges: list[Exchange], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in exchanges:
            fh.write(json.dumps(
                {"index": ex.index, "request_hash": ex.request_hash, "reply": ex.reply},
                ensure_ascii=False) + "\n")


def load_fixture(path) -> list[Exchange]:
    exchanges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                exchanges.append(Exchange(obj["index"], obj["request_hash"], obj["reply"]))
    return exchanges


class RecordingBackend(Backend):
    """Wraps another backend and captures every exchange for later replay."""

    def __init__(self, inner: Backend):
        self.inner = inner
        self.exchanges: list[Exchange] = []

    def send(self, request: ChatRequest) -> BackendReply:
        reply = self.inner.send(request)
        self.exchanges.append(
            Exchange(len(self.exchanges), request_hash(request), reply.text))
        return reply

    def save(self, path) -> None:
        record_fixture(self.exchanges, path)


# ---------------------------------------------------------------------------
# Scripted mock


class ScriptedBackend(Backend):
    """Rule-based mock: the rules callable maps the last user prompt to a
    reply.  Chains ending in the silent-mode acknowledgement always get
    "Yes" so scripted sessions behave like a cooperative counterpart."""

    def __init__(self, rules=None):
        self.rules = rules

    def send(self, request: ChatRequest) -> BackendReply:
        prompt = request.turns[-1].text
        if _ends_with_ack(prompt):
            return BackendReply("Yes")
        if self.rules is not None:
            reply = self.rules(prompt, request)
            if reply is not None:
                if isinstance(reply, BackendReply):
                    return reply
                return BackendReply(str(reply))
        return BackendReply(f"Acknowledged: {prompt[:60]}")


def _ends_with_ack(prompt: str) -> bool:
    tail = prompt.rstrip().lower()
    return tail.endswith(('say "yes" or say "no".', "say yes or say no!",
                          'say "yes" or say "no"!', "say yes or say no."))


# ---------------------------------------------------------------------------
# Live HTTP


class LiveBackend(Backend):
    """Chat-completions JSON wire format over HTTP.

    Credential comes from the environment, never from arguments, so it
    cannot leak into fixtures or logs.  ``transport`` is injectable for
    capture tests: a callable (url, headers, body) -> (status, json_body).
    """

    RETRIES = 3

    def __init__(self, endpoint: str, credential_env: str = "EABSS_API_KEY",
                 transport=None, backoff: float = 1.0):
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.transport = transport or _requests_transport
        self.backoff = backoff

    def serialize(self, request: ChatRequest) -> dict:
        return {
            "model": request.params.model_id,
            "messages": request.messages(),
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
        }

    def send(self, request: ChatRequest) -> BackendReply:
        credential = os.environ.get(self.credential_env)
        if not credential:
            raise AuthFailure(f"no credential in ${self.credential_env}")
        headers = {"Authorization": f"Bearer {credential}",
                   "Content-Type": "application/json"}
        body = self.serialize(request)
        last_error = None
        for attempt in range(self.RETRIES):
            try:
                status, payload = self.transport(self.endpoint, headers, body)
            except OSError as exc:
                last_error = exc
                time.sleep(self.backoff * 2 ** attempt)
                continue
            if status == 401:
                raise AuthFailure("backend rejected the credential")
            if status == 429:
                wait = float(payload.get("retry_after", self.backoff)) if payload else self.backoff
                if attempt == self.RETRIES - 1:
                    raise RateLimited(wait)
                time.sleep(wait)
                continue
            if status >= 500:
                last_error = NetworkFailure(f"server error {status}")
                time.sleep(self.backoff * 2 ** attempt)
                continue
            choice = payload["choices"][0]
            return BackendReply(
                choice["message"]["content"],
                truncated=choice.get("finish_reason") == "length",
            )
        raise NetworkFailure(f"request failed after {self.RETRIES} attempts: {last_error}")


def _requests_transport(url, headers, body):
    import requests

    resp = requests.post(url, headers=headers, json=body, timeout=60)
    try:
        payload = resp.json()
    except ValueError:
        payload = None
    return resp.status_code, payload
