"""Parser and static checker for chained prompt scripts.

The on-disk format is line oriented:

* ALL-CAPS standalone lines (or ``#``-prefixed lines) open segments.
* Title-Case standalone lines open subsections within a segment.
* ``- `` bullets are prompt chains; a leading ``[optional]`` marks a
  co-creation chain that may be skipped at run time, ``[intervene]`` marks
  a chain that pauses for human dispatch.
* Within a bullet, ``|`` separates commands (only at top level, never
  inside quotes, parentheses or braces).

Commands are decomposed into directives by anchored keyword phrases;
anything unrecognised is kept verbatim as FreeText so that no input text
is ever dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import EmptyScript, MissingSlot, UnterminatedBrace

KEY_NAME_RE = re.compile(r"^key-[A-Za-z0-9]+(?:[-_][A-Za-z0-9]+)*$")


def normalize_key(text: str) -> str:
    """Strip braces/emphasis from a key token and lowercase the prefix."""
    name = text.strip().strip("*`").strip("{}").strip("*`")
    if name.lower().startswith("key-"):
        name = "key-" + name[4:]
    return name


@dataclass(frozen=True)
class KeyRef:
    name: str

    def __post_init__(self):
        if not KEY_NAME_RE.match(self.name):
            raise ValueError(f"malformed key name: {self.name!r}")

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# Directives


@dataclass(frozen=True)
class Directive:
    raw: str


@dataclass(frozen=True)
class RoleChange(Directive):
    role: str
    experience: str


@dataclass(frozen=True)
class ToneChange(Directive):
    tone: str


@dataclass(frozen=True)
class Memorise(Directive):
    key: KeyRef
    description: str


@dataclass(frozen=True)
class ListKey(Directive):
    key: KeyRef


@dataclass(frozen=True)
class DisplayHeading(Directive):
    text: str
    level: int


@dataclass(frozen=True)
class WordLimit(Directive):
    n: int
    soft: bool


@dataclass(frozen=True)
class SilentModeTerminator(Directive):
    pass


@dataclass(frozen=True)
class RequirementsList(Directive):
    items: tuple[str, ...]


@dataclass(frozen=True)
class TableFormat(Directive):
    pass


@dataclass(frozen=True)
class DiagramRequest(Directive):
    kind: str  # one of diagrams.KINDS


@dataclass(frozen=True)
class FreeText(Directive):
    pass


@dataclass(frozen=True)
class Command:
    raw: str
    directives: tuple[Directive, ...]


@dataclass(frozen=True)
class PromptChain:
    commands: tuple[Command, ...]
    raw_text: str
    optional: bool = False
    intervene: bool = False

    @property
    def directives(self) -> tuple[Directive, ...]:
        return tuple(d for c in self.commands for d in c.directives)

    @property
    def ends_silent(self) -> bool:
        ds = self.directives
        return bool(ds) and isinstance(ds[-1], SilentModeTerminator)


@dataclass(frozen=True)
class Subsection:
    heading: str
    chains: tuple[PromptChain, ...]


@dataclass(frozen=True)
class Segment:
    name: str
    subsections: tuple[Subsection, ...]

    @property
    def chains(self) -> tuple[PromptChain, ...]:
        return tuple(c for s in self.subsections for c in s.chains)


@dataclass(frozen=True)
class ScriptDocument:
    segments: tuple[Segment, ...]
    case_slots: tuple[str, ...]
    source_text: str
    external_keys: frozenset[str] = frozenset()

    @property
    def chains(self) -> tuple[PromptChain, ...]:
        return tuple(c for seg in self.segments for c in seg.chains)


@dataclass(frozen=True)
class CaseBinding:
    topic: str
    research_design: str
    domain: str
    specialisation: str

    def __post_init__(self):
        if not self.topic.strip():
            raise ValueError("topic must be non-empty")


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    message: str
    severity: str = "error"  # "error" | "warning"
    chain_index: int = -1


# ---------------------------------------------------------------------------
# Line classification

_SEGMENT_RE = re.compile(r"^[A-Z][A-Z0-9 &/_-]*$")
_TITLE_WORD_RE = re.compile(r"^(?:[A-Z][A-Za-z0-9'-]*|&|and|of|the|for)$")


def _is_segment_heading(line: str) -> bool:
    return bool(_SEGMENT_RE.match(line)) and line == line.upper() and any(c.isalpha() for c in line)


def _is_subsection_heading(line: str) -> bool:
    if "|" in line or line.endswith(".") or len(line) > 60:
        return False
    words = line.split()
    return 0 < len(words) <= 6 and all(_TITLE_WORD_RE.match(w) for w in words)


def split_commands(text: str) -> list[str]:
    """Split a bullet on '|' at top level (outside quotes, parens, braces)."""
    parts, depth, quote, start = [], 0, None, 0
    for i, ch in enumerate(text):
        if quote:
            if ch == quote:
                quote = None
            continue
        if ch in "\"'":
            # treat as quote only when it opens a quoted phrase; apostrophes
            # inside words (actor's) must not toggle quoting
            if ch == '"' or (i == 0 or not text[i - 1].isalnum()):
                if ch in text[i + 1:]:
                    quote = ch
            continue
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth = max(0, depth - 1)
        elif ch == "|" and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


# ---------------------------------------------------------------------------
# Directive recognition

_KEY_TOKEN = r"\*{0,2}\{?(key-[A-Za-z0-9_-]+)\}?\*{0,2}"

_ROLE_RE = re.compile(
    r"Take on the \"?role\"? of (?:an? |the )?\"([^\"]+)\" with experience in "
    r"(?:the )?\"([^\"]+)\"(?:,? during the entire conversation(?:, unless instructed otherwise)?)?\.?"
)
_TONE_RE = re.compile(
    r"Use an? \"([^\"]*tone)\"(?:,? during the entire conversation(?:, unless instructed otherwise)?)?\.?"
)
_MEMORISE_RE = re.compile(r"Memorise\b([^|]*?) as " + _KEY_TOKEN + r"\.?")
_MEMORISE_USING_RE = re.compile(r"Memorise details using a " + _KEY_TOKEN + r"\.?")
_LISTKEY_RE = re.compile(r"List (?:the )?(?:ALL \d+ )?memorised " + _KEY_TOKEN + r"\.?")
_HEADING_RE = re.compile(
    r"Display MD \"([^\"]+)\"\.?(?:\s*Render as 'Heading Level (\d+)'\.?)?"
    r"(?:\s*Only show rendered result\.?)?"
)
_WORDLIMIT_RE = re.compile(r"(?:ABOUT )?(\d+) WORDS?\b( \(if possible\))?")
_SILENT_RE = re.compile(
    r"(?:Do not print anything! ?)?Got it\? Say \"?yes\"?,? or say \"?no\"?[.!]?",
    re.IGNORECASE,
)
_TABLEFMT_RE = re.compile(
    r"(?:DO NOT USE CODE FORMATTING FOR THE FOLLOWING TABLE\. )?"
    r"Use TABLE format WITH \"plaintext\" and WITHOUT any code formatting\.?"
    r"(?: DO NOT use \"[^\"]*\"\.?)?(?: IGNORE ALL space limitations\.?)?"
)
_DIAGRAM_RE = re.compile(
    r"[Gg]enerate a script for a '(?:comprehensive )?([a-z ]+?) diagram' in \"Mermaid\.js\"\.?"
)
_REQUIREMENTS_HEAD_RE = re.compile(
    r"You ALWAYS must satisfy the following (\d+) requirements[^:]*: "
)
_REQ_ITEM_RE = re.compile(r"\b(\d+)\) ")

_DIAGRAM_KINDS = {
    "use case": "usecase",
    "class": "class",
    "state machine": "state",
    "sequence": "sequence",
}


def _simple_matches(text: str):
    out = []
    for m in _ROLE_RE.finditer(text):
        out.append((m.start(), m.end(), RoleChange(m.group(0), m.group(1), m.group(2))))
    for m in _TONE_RE.finditer(text):
        out.append((m.start(), m.end(), ToneChange(m.group(0), m.group(1))))
    for m in _MEMORISE_RE.finditer(text):
        key = KeyRef(normalize_key(m.group(2)))
        out.append((m.start(), m.end(), Memorise(m.group(0), key, m.group(1).strip())))
    for m in _MEMORISE_USING_RE.finditer(text):
        key = KeyRef(normalize_key(m.group(1)))
        out.append((m.start(), m.end(), Memorise(m.group(0), key, "details")))
    for m in _LISTKEY_RE.finditer(text):
        out.append((m.start(), m.end(), ListKey(m.group(0), KeyRef(normalize_key(m.group(1))))))
    for m in _HEADING_RE.finditer(text):
        level = int(m.group(2)) if m.group(2) else 3
        out.append((m.start(), m.end(), DisplayHeading(m.group(0), m.group(1), level)))
    for m in _WORDLIMIT_RE.finditer(text):
        out.append((m.start(), m.end(), WordLimit(m.group(0), int(m.group(1)), m.group(2) is not None)))
    for m in _SILENT_RE.finditer(text):
        out.append((m.start(), m.end(), SilentModeTerminator(m.group(0))))
    for m in _TABLEFMT_RE.finditer(text):
        out.append((m.start(), m.end(), TableFormat(m.group(0))))
    for m in _DIAGRAM_RE.finditer(text):
        kind = _DIAGRAM_KINDS.get(m.group(1).strip())
        if kind:
            out.append((m.start(), m.end(), DiagramRequest(m.group(0), kind)))
    return out


def parse_command(raw: str) -> Command:
    """Decompose one command into directives, keeping every byte of input."""
    text = raw
    matches = _simple_matches(text)

    # requirements lists swallow everything up to the next recognised
    # directive (or end of command); their items may hold full sentences
    for hm in _REQUIREMENTS_HEAD_RE.finditer(text):
        ends = [s for s, _, _ in matches if s >= hm.end()]
        end = min(ends) if ends else len(text)
        body = text[hm.end():end]
        marks = list(_REQ_ITEM_RE.finditer(body))
        items = []
        for i, mk in enumerate(marks):
            stop = marks[i + 1].start() if i + 1 < len(marks) else len(body)
            items.append(body[mk.end():stop].strip())
        matches.append((hm.start(), end, RequirementsList(text[hm.start():end], tuple(items))))

    matches.sort(key=lambda t: (t[0], -(t[1] - t[0])))
    chosen, pos = [], 0
    for start, end, d in matches:
        if start >= pos:
            chosen.append((start, end, d))
            pos = end

    directives, cursor = [], 0
    for start, end, d in chosen:
        gap = text[cursor:start]
        if gap.strip():
            directives.append(FreeText(gap))
        directives.append(d)
        cursor = end
    tail = text[cursor:]
    if tail.strip():
        directives.append(FreeText(tail))
    if not directives:
        directives.append(FreeText(text))
    return Command(raw, tuple(directives))


_ANNOTATION_RE = re.compile(r"^\[(optional|intervene)\]\s*")


def parse_chain(raw_text: str, line_no: int = 0) -> PromptChain:
    body = raw_text
    optional = intervene = False
    m = _ANNOTATION_RE.match(body)
    if m:
        optional = m.group(1) == "optional"
        intervene = m.group(1) == "intervene"
        body = body[m.end():]
    if body.count("{") != body.count("}"):
        raise UnterminatedBrace(line_no, body[:80])
    commands = tuple(parse_command(c) for c in split_commands(body))
    return PromptChain(commands, raw_text, optional=optional, intervene=intervene)


def parse_script(source: str, external_keys: frozenset[str] = frozenset()) -> ScriptDocument:
    if not source.strip():
        raise EmptyScript("script source is empty")

    segments: list[tuple[str, list[tuple[str, list[PromptChain]]]]] = []

    def ensure_segment(name):
        segments.append((name, [("", [])]))

    def current_bucket():
        if not segments:
            ensure_segment("SCRIPT")
        return segments[-1][1][-1][1]

    pending: str | None = None
    pending_line = 0
    pending_blank = False

    def flush():
        nonlocal pending
        if pending is not None:
            current_bucket().append(parse_chain(pending, pending_line))
            pending = None

    for i, rawline in enumerate(source.splitlines(), start=1):
        line = rawline.rstrip()
        stripped = line.strip()
        if not stripped:
            pending_blank = True
            continue
        if stripped.startswith("# "):
            flush()
            ensure_segment(stripped[2:].strip())
        elif _is_segment_heading(stripped):
            flush()
            ensure_segment(stripped)
        elif stripped.startswith("- "):
            flush()
            pending, pending_line = stripped[2:], i
        elif pending is not None and not pending_blank:
            # wrapped continuation of the previous bullet
            pending += " " + stripped
        elif _is_subsection_heading(stripped):
            flush()
            if not segments:
                ensure_segment("SCRIPT")
            segments[-1][1].append((stripped, []))
        else:
            # lossless fallback: orphan prose becomes its own chain
            flush()
            pending, pending_line = stripped, i
        pending_blank = False
    flush()

    seg_objs = tuple(
        Segment(name, tuple(Subsection(h, tuple(chains)) for h, chains in subs if chains or h))
        for name, subs in segments
    )
    seg_objs = tuple(s for s in seg_objs if s.chains)
    if not seg_objs:
        raise EmptyScript("script contains no prompt chains")
    names = [s.name for s in seg_objs]
    if len(names) != len(set(names)):
        raise ValueError(f"duplicate segment names: {names}")

    slots = tuple(slot for slot, pat in _SLOT_PATTERNS.items() if pat.search(source))
    return ScriptDocument(seg_objs, slots, source, external_keys)


def render_chain(chain: PromptChain) -> str:
    return chain.raw_text


# ---------------------------------------------------------------------------
# Case binding

_SLOT_PATTERNS = {
    "topic": re.compile(
        r'(Define the "topic" of the memorised key-studyType as ")(.*?)("\. Memorise this topic as \{key-topic\})'
    ),
    "research_design": re.compile(r'(Memorise ")([^"]*)(" as \{key-researchDesign\})'),
    "domain": re.compile(r'(Memorise ")([^"]*)(" as \{key-domain\})'),
    "specialisation": re.compile(r'(Memorise ")([^"]*)(" as \{key-specialisation\})'),
}


def bind_case(doc: ScriptDocument, binding: CaseBinding) -> ScriptDocument:
    """Replace the four case-slot texts; every other byte is untouched."""
    text = doc.source_text
    values = {
        "topic": binding.topic,
        "research_design": binding.research_design,
        "domain": binding.domain,
        "specialisation": binding.specialisation,
    }
    for slot, pattern in _SLOT_PATTERNS.items():
        if not pattern.search(text):
            raise MissingSlot(slot)
        text = pattern.sub(
            lambda m, v=values[slot]: m.group(1) + v + m.group(3), text, count=1
        )
    return parse_script(text, doc.external_keys)


# ---------------------------------------------------------------------------
# Static checks

_KEY_OCCURRENCE_RE = re.compile(r"\*{0,2}\{?key-[A-Za-z0-9_-]+\}?\*{0,2}")
_EXAMPLE_SPAN_RE = re.compile(r"\(Example[^)]*\)")


def _key_events(chain: PromptChain):
    """Yield ('write'|'read'|'update', key) in textual order for one chain."""
    offset = 0
    for cmd in chain.commands:
        write_spans = []
        for d in cmd.directives:
            if isinstance(d, Memorise):
                pos = cmd.raw.find(d.raw)
                write_spans.append((pos, pos + len(d.raw), d.key.name))
        example_spans = [(m.start(), m.end()) for m in _EXAMPLE_SPAN_RE.finditer(cmd.raw)]
        events = []
        for m in _KEY_OCCURRENCE_RE.finditer(cmd.raw):
            name = normalize_key(m.group(0))
            if not KEY_NAME_RE.match(name):
                continue
            if any(s <= m.start() < e for s, e in example_spans):
                continue
            kind = "read"
            for s, e, wkey in write_spans:
                if s <= m.start() < e and wkey == name:
                    kind = "write"
                    break
            if kind == "read" and re.search(
                r"Update the memorised $", cmd.raw[:m.start()]
            ):
                kind = "update"
            events.append((m.start() + offset, kind, name))
        events.sort()
        for _, kind, name in events:
            yield kind, name
        offset += len(cmd.raw) + 1


def static_check(doc: ScriptDocument) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    memorised: set[str] = set()
    optional_only: set[str] = set()

    for idx, chain in enumerate(doc.chains):
        for kind, name in _key_events(chain):
            if kind == "write":
                if name in memorised and not _has_update(chain, name):
                    diags.append(Diagnostic(
                        "DuplicateMemoriseWithoutUpdate",
                        f"{name} memorised twice without an update", "error", idx))
                memorised.add(name)
                if chain.optional:
                    optional_only.add(name)
                else:
                    optional_only.discard(name)
            elif kind == "update":
                memorised.add(name)
            else:
                if name not in memorised and name not in doc.external_keys:
                    diags.append(Diagnostic(
                        "KeyReadBeforeMemorise",
                        f"{name} read before it is memorised", "error", idx))
                elif name in optional_only and not chain.optional:
                    diags.append(Diagnostic(
                        "OptionalKeyDependency",
                        f"{name} is only memorised in a skippable chain", "warning", idx))

        terminators = [d for d in chain.directives if isinstance(d, SilentModeTerminator)]
        silent_requested = any("Do not print anything" in c.raw for c in chain.commands)
        if (terminators and chain.directives[-1] is not terminators[-1]) or (
            silent_requested and not terminators
        ):
            diags.append(Diagnostic(
                "SilentChainWithoutAck",
                "silent-mode chain does not end with a yes/no acknowledgement",
                "error", idx))
    return diags


def _has_update(chain: PromptChain, name: str) -> bool:
    return f"Update the memorised {name}" in chain.raw_text or (
        f"Update the memorised {{{name}}}" in chain.raw_text
    )


def errors_of(diags: list[Diagnostic], rule: str | None = None) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error" and (rule is None or d.rule == rule)]
