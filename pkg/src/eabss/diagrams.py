"""Parse, validate and auto-repair the Mermaid subset used for the four
diagram kinds (use case flowchart, class, state machine, sequence).

Only the constructs the prompts demand are modelled; anything else is
kept verbatim and reported as a diagnostic rather than crashing.  Repairs
are restricted to renames, removals and punctuation so that a repaired
diagram never contains nodes or edges the original did not have.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import MissingHeader, UnresolvedErrors

USECASE = "usecase"
CLASS = "class"
STATE = "state"
SEQUENCE = "sequence"
KINDS = (USECASE, CLASS, STATE, SEQUENCE)

START = "[*]"  # state machine start/stop pseudo node


@dataclass(frozen=True)
class Node:
    id: str
    label: str
    kind: str  # actor | usecase | class | state | participant
    members: tuple[str, ...] = ()


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    label: str = ""
    kind: str = "link"  # link | transition | message


@dataclass(frozen=True)
class Note:
    target: str
    placement: str
    text: str


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    line: int
    message: str
    severity: str = "error"  # error | warning
    auto_fixable: bool = False

    def to_dict(self) -> dict:
        return {"rule": self.rule, "line": self.line, "message": self.message,
                "severity": self.severity, "auto_fixable": self.auto_fixable}


@dataclass(frozen=True)
class Repair:
    rule: str
    line: int
    before: str
    after: str  # empty string means the line was removed


@dataclass
class RepairReport:
    applied: list[Repair] = field(default_factory=list)
    unresolved: list[Diagnostic] = field(default_factory=list)


@dataclass(frozen=True)
class DiagramScript:
    kind: str
    raw_lines: tuple[str, ...]
    header: str
    name: str  # state machines: the %% Name: comment value
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    notes: tuple[Note, ...]
    parse_diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def text(self) -> str:
        return "\n".join(self.raw_lines)

    def node(self, node_id: str) -> Node | None:
        for n in self.nodes:
            if n.id == node_id:
                return n
        return None

    def structure(self):
        return (self.kind, frozenset(self.nodes), frozenset(self.edges),
                frozenset(self.notes))


# ---------------------------------------------------------------------------
# Parsing

_HEADERS = {
    USECASE: re.compile(r"^graph\s+(\w+)\s*$"),
    CLASS: re.compile(r"^classDiagram\s*$"),
    STATE: re.compile(r"^stateDiagram(?:-v2)?\s*$"),
    SEQUENCE: re.compile(r"^sequenceDiagram\s*$"),
}

_ACTOR_NODE_RE = re.compile(r"^(\w+)\(\((.*)\)\)$")
_USECASE_NODE_RE = re.compile(r"^(\w+)\(\[(.*)\]\)$")
_UC_EDGE_RE = re.compile(r"^(.*?)\s*--+>\s*(?:\|([^|]*)\|\s*)?(.*)$")
_SM_TRANSITION_RE = re.compile(r"^(\S+)\s*--+>\s*(\S+)\s*(?::\s*(.*))?$")
_NOTE_RE = re.compile(r"^[Nn]ote\s+(left of|right of|over)\s+([^:]+?)\s*:\s*(.*)$")
_CLASS_OPEN_RE = re.compile(r"^class\s+(\w+)\s*\{\s*$")
_CLASS_ONE_RE = re.compile(r"^class\s+(\w+)\s*$")
_CLASS_MEMBER_COLON_RE = re.compile(r"^(\w+)\s*:\s*(.+)$")
_SEQ_DECL_RE = re.compile(r"^(actor|participant)\s+(.+?)\s*$")
_SEQ_MSG_RE = re.compile(r"^(.+?)\s*(-{1,2}>>?)\s*([+-]?)\s*(.+?)\s*:\s*(.*)$")
_SEQ_ACTIVATE_RE = re.compile(r"^(activate|deactivate)\s+(.+?)\s*$")
_STATE_CMD_RE = re.compile(r"^state\b.*$")
_NAME_COMMENT_RE = re.compile(r"^%%\s*Name:\s*(.*)$")


def parse_diagram(kind: str, text: str) -> DiagramScript:
    if kind not in KINDS:
        raise ValueError(f"unknown diagram kind: {kind}")
    lines = text.splitlines()
    stripped = [ln.strip() for ln in lines]
    header_line = None
    for i, ln in enumerate(stripped):
        if not ln or ln.startswith("```"):
            continue
        if ln.startswith("%%"):
            continue
        if _HEADERS[kind].match(ln):
            header_line = i
        break
    if header_line is None:
        raise MissingHeader(f"expected a {kind} diagram header")

    parser = {USECASE: _parse_usecase, CLASS: _parse_class,
              STATE: _parse_state, SEQUENCE: _parse_sequence}[kind]
    nodes, edges, notes, diags, name = parser(stripped, header_line)
    return DiagramScript(kind, tuple(lines), stripped[header_line], name,
                         tuple(nodes), tuple(edges), tuple(notes), tuple(diags))


def _dedupe_nodes(nodes: list[Node]) -> list[Node]:
    seen, out = {}, []
    for n in nodes:
        if n.id not in seen:
            seen[n.id] = n
            out.append(n)
        elif seen[n.id].kind == "ref" and n.kind != "ref":
            out[out.index(seen[n.id])] = n
            seen[n.id] = n
    return out


def _parse_uc_endpoint(token: str, nodes: list[Node], diags, line_no):
    token = token.strip()
    m = _ACTOR_NODE_RE.match(token)
    if m:
        nodes.append(Node(m.group(1), m.group(2), "actor"))
        return m.group(1)
    m = _USECASE_NODE_RE.match(token)
    if m:
        nodes.append(Node(m.group(1), m.group(2), "usecase"))
        return m.group(1)
    if re.match(r"^\w+$", token):
        nodes.append(Node(token, token, "ref"))
        return token
    diags.append(Diagnostic("unparsed-endpoint", line_no,
                            f"cannot read node {token!r}", "warning"))
    return None


def _parse_usecase(lines, header_line):
    nodes, edges, notes, diags = [], [], [], []
    for i, ln in enumerate(lines):
        if i == header_line or not ln or ln.startswith("%%") or ln.startswith("```"):
            continue
        if ln == "end" or ln.startswith("subgraph"):
            diags.append(Diagnostic("uc-subgraph", i, "subgraphs are not allowed",
                                    auto_fixable=True))
            continue
        m = _UC_EDGE_RE.match(ln)
        if m:
            src = _parse_uc_endpoint(m.group(1), nodes, diags, i)
            dst = _parse_uc_endpoint(m.group(3), nodes, diags, i)
            if src and dst:
                edges.append(Edge(src, dst, m.group(2) or ""))
            continue
        if _parse_uc_endpoint(ln, nodes, diags, i) is None:
            diags.append(Diagnostic("unparsed-line", i, f"kept verbatim: {ln!r}",
                                    "warning"))
    return _dedupe_nodes(nodes), edges, notes, diags, ""


def _parse_state(lines, header_line):
    nodes, edges, notes, diags = [], [], [], []
    name = ""
    for i, ln in enumerate(lines):
        nm = _NAME_COMMENT_RE.match(ln)
        if nm:
            name = nm.group(1).strip()
    first_content = next((i for i, ln in enumerate(lines) if ln and not ln.startswith("```")), None)
    if first_content is not None and not _NAME_COMMENT_RE.match(lines[first_content]):
        diags.append(Diagnostic("sm-missing-name", first_content,
                                "line 0 must be a '%% Name:' comment", auto_fixable=True))
    state_ids = set()

    def touch(state):
        if state != START and state not in state_ids:
            state_ids.add(state)
            nodes.append(Node(state, state, "state"))

    for i, ln in enumerate(lines):
        if i == header_line or not ln or ln.startswith("%%") or ln.startswith("```"):
            continue
        if ";" in ln:
            diags.append(Diagnostic("sm-semicolon", i,
                                    "semicolons must be full stops", auto_fixable=True))
        bare = ln.replace(";", ".")
        m = _NOTE_RE.match(bare)
        if m:
            notes.append(Note(m.group(2).strip(), m.group(1), m.group(3)))
            continue
        if _STATE_CMD_RE.match(bare) or bare in ("{", "}") or bare.endswith("{"):
            diags.append(Diagnostic("sm-compound", i,
                                    "'state' commands and compound blocks are not allowed",
                                    auto_fixable=True))
            continue
        m = _SM_TRANSITION_RE.match(bare)
        if m:
            touch(m.group(1))
            touch(m.group(2))
            edges.append(Edge(m.group(1), m.group(2), m.group(3) or "", "transition"))
            continue
        diags.append(Diagnostic("unparsed-line", i, f"kept verbatim: {ln!r}", "warning"))
    return nodes, edges, notes, diags, name


def _parse_class(lines, header_line):
    nodes, edges, notes, diags = [], [], [], []
    current: tuple[str, list[str]] | None = None
    for i, ln in enumerate(lines):
        if i == header_line or not ln or ln.startswith("%%") or ln.startswith("```"):
            continue
        if current is not None:
            if ln == "}":
                nodes.append(Node(current[0], current[0], "class", tuple(current[1])))
                current = None
            else:
                current[1].append(ln)
            continue
        m = _CLASS_OPEN_RE.match(ln)
        if m:
            current = (m.group(1), [])
            continue
        m = _CLASS_ONE_RE.match(ln)
        if m:
            nodes.append(Node(m.group(1), m.group(1), "class"))
            continue
        m = _CLASS_MEMBER_COLON_RE.match(ln)
        if m:
            nodes.append(Node(m.group(1), m.group(1), "class", (m.group(2),)))
            continue
        diags.append(Diagnostic("unparsed-line", i, f"kept verbatim: {ln!r}", "warning"))
    if current is not None:
        nodes.append(Node(current[0], current[0], "class", tuple(current[1])))
        diags.append(Diagnostic("unclosed-class", len(lines) - 1,
                                f"class {current[0]} has no closing brace", "warning"))
    # merge repeated blocks for the same class name into one node per id is
    # deliberately NOT done: duplicates are a validation finding
    return nodes, edges, notes, diags, ""


def _parse_sequence(lines, header_line):
    nodes, edges, notes, diags = [], [], [], []
    for i, ln in enumerate(lines):
        if i == header_line or not ln or ln.startswith("%%") or ln.startswith("```"):
            continue
        m = _NOTE_RE.match(ln)
        if m:
            notes.append(Note(m.group(2).strip(), m.group(1), m.group(3)))
            continue
        m = _SEQ_DECL_RE.match(ln)
        if m:
            nodes.append(Node(m.group(2), m.group(2), m.group(1)))
            continue
        m = _SEQ_ACTIVATE_RE.match(ln)
        if m:
            edges.append(Edge(m.group(2), m.group(2), m.group(1), "activation"))
            continue
        m = _SEQ_MSG_RE.match(ln)
        if m:
            src, arrow, marker, dst, label = m.groups()
            edges.append(Edge(src.strip(), dst.strip(), label, "message"))
            if marker == "+":
                edges.append(Edge(dst.strip(), dst.strip(), "activate", "activation"))
            elif marker == "-":
                edges.append(Edge(src.strip(), src.strip(), "deactivate", "activation"))
            continue
        if ln in ("end",) or ln.split()[0] in ("loop", "alt", "else", "opt", "par", "and"):
            continue  # grouping frames are passed through untouched
        diags.append(Diagnostic("unparsed-line", i, f"kept verbatim: {ln!r}", "warning"))
    return _dedupe_nodes(nodes), edges, notes, diags, ""


# ---------------------------------------------------------------------------
# Validation

_BRACKETS = "()[]{}"
_GETSET_RE = re.compile(r"^[+\-#~]?\s*(get|set)[A-Z_]", re.IGNORECASE)


def validate(d: DiagramScript, actor_names: set[str] | None = None) -> list[Diagnostic]:
    diags = [x for x in d.parse_diagnostics if x.rule != "unparsed-endpoint"]
    checker = {USECASE: _validate_usecase, CLASS: _validate_class,
               STATE: _validate_state, SEQUENCE: _validate_sequence}[d.kind]
    diags.extend(checker(d, actor_names))
    return diags


def _line_of(d: DiagramScript, needle: str) -> int:
    for i, ln in enumerate(d.raw_lines):
        if needle in ln:
            return i
    return 0


def _validate_usecase(d: DiagramScript, actor_names):
    diags = []
    if d.header != "graph LR":
        diags.append(Diagnostic("uc-header", _line_of(d, d.header),
                                'header must be "graph LR"', auto_fixable=True))
    kinds = {n.id: n.kind for n in d.nodes}
    linked_to_usecase = set()
    usecase_linked = set()
    for e in d.edges:
        sk, dk = kinds.get(e.src), kinds.get(e.dst)
        if sk == "actor" and dk == "actor":
            diags.append(Diagnostic("uc-actor-actor-edge", _line_of(d, f"{e.src} "),
                                    f"actor-to-actor edge {e.src} --> {e.dst}",
                                    auto_fixable=True))
        if sk == "actor" and dk == "usecase":
            linked_to_usecase.add(e.src)
            usecase_linked.add(e.dst)
        if sk == "usecase" and dk == "actor":
            linked_to_usecase.add(e.dst)
            usecase_linked.add(e.src)
        if sk == "usecase" and dk == "usecase" and e.src != e.dst:
            usecase_linked.add(e.src)
    for n in d.nodes:
        if n.kind == "actor":
            if n.id not in linked_to_usecase:
                diags.append(Diagnostic("uc-actor-unlinked", _line_of(d, n.id),
                                        f"actor {n.id} is not linked to any use case"))
            if any(b in n.label for b in _BRACKETS):
                diags.append(Diagnostic("uc-actor-brackets", _line_of(d, n.label),
                                        f"actor name contains brackets: {n.label!r}",
                                        auto_fixable=True))
        elif n.kind == "usecase" and n.id not in usecase_linked:
            diags.append(Diagnostic("uc-usecase-unlinked", _line_of(d, n.id),
                                    f"use case {n.id} links to no actor or use case"))
    return diags


def _validate_state(d: DiagramScript, actor_names):
    diags = []
    if not d.name:
        pass  # covered by the sm-missing-name parse diagnostic
    entries = {e.dst for e in d.edges if e.kind == "transition"}
    exits = {e.src for e in d.edges if e.kind == "transition"}
    if START not in {e.src for e in d.edges}:
        diags.append(Diagnostic("sm-no-start", 0, "no start transition from [*]"))
    noted = {n.target for n in d.notes}
    for n in d.nodes:
        if n.id not in entries:
            diags.append(Diagnostic("sm-no-entry", _line_of(d, n.id),
                                    f"state {n.id} has no entry transition",
                                    auto_fixable=True))
        if n.id not in exits:
            diags.append(Diagnostic("sm-no-exit", _line_of(d, n.id),
                                    f"state {n.id} has no exit transition",
                                    auto_fixable=True))
        if n.id not in noted:
            diags.append(Diagnostic("sm-missing-note", _line_of(d, n.id),
                                    f"state {n.id} has no explanatory note",
                                    auto_fixable=True))
    for e in d.edges:
        if e.kind == "transition":
            src_ok = e.src == START or d.node(e.src)
            dst_ok = e.dst == START or d.node(e.dst)
            if not (src_ok and dst_ok):  # pragma: no cover - touch() adds both
                diags.append(Diagnostic("sm-bad-endpoint", 0,
                                        f"unknown endpoint in {e.src} --> {e.dst}"))
    return diags


def _validate_class(d: DiagramScript, actor_names):
    diags = []
    names = [n.id for n in d.nodes]
    lab_count = names.count("ArtificialLab")
    if lab_count == 0:
        diags.append(Diagnostic("cd-artificial-lab", 0,
                                "the main ArtificialLab class is missing"))
    elif lab_count > 1:
        diags.append(Diagnostic("cd-artificial-lab-dup", 0,
                                "more than one ArtificialLab class", auto_fixable=True))
    seen = set()
    for n in d.nodes:
        if n.id in seen and n.id != "ArtificialLab":
            diags.append(Diagnostic("cd-dup-class", _line_of(d, n.id),
                                    f"duplicate class name {n.id}", auto_fixable=True))
        seen.add(n.id)
        for member in n.members:
            if _GETSET_RE.match(member.strip()) and "(" in member:
                diags.append(Diagnostic("cd-getter-setter", _line_of(d, member.strip()),
                                        f"getter/setter operation {member.strip()!r}",
                                        auto_fixable=True))
    for i, ln in enumerate(d.raw_lines):
        if "/" in ln:
            diags.append(Diagnostic("cd-slash-line", i,
                                    f"line contains '/': {ln.strip()!r}",
                                    auto_fixable=True))
    return diags


def _validate_sequence(d: DiagramScript, actor_names):
    diags = []
    for n in d.nodes:
        if n.kind == "participant":
            if actor_names and n.id in actor_names:
                diags.append(Diagnostic("sq-participant-actor", _line_of(d, n.id),
                                        f"{n.id} must be declared with 'actor'",
                                        auto_fixable=True))
            elif actor_names is None:
                diags.append(Diagnostic("sq-participant", _line_of(d, n.id),
                                        f"{n.id} declared as participant; use 'actor' "
                                        "for human lifelines", "warning"))
    balance: dict[str, int] = {}
    for e in d.edges:
        if e.kind == "activation":
            delta = 1 if e.label in ("activate", "+") or e.label == "activate" else -1
            if e.label == "deactivate":
                delta = -1
            balance[e.src] = balance.get(e.src, 0) + delta
    for lifeline, n in balance.items():
        if n != 0:
            diags.append(Diagnostic("sq-unbalanced-activation", _line_of(d, lifeline),
                                    f"activations of {lifeline} do not balance ({n:+d})"))
    return diags


def error_count(diags) -> int:
    return sum(1 for x in diags if x.severity == "error")


# ---------------------------------------------------------------------------
# Repair

_MAX_PASSES = 10


def repair(d: DiagramScript, actor_names: set[str] | None = None):
    """Apply every auto-fixable rule until stable.  Returns the repaired
    script and a report; unresolved Error diagnostics stay in the report."""
    report = RepairReport()
    current = d
    for _ in range(_MAX_PASSES):
        diags = validate(current, actor_names)
        fixable = [x for x in diags if x.auto_fixable]
        if not fixable:
            break
        new_lines = _apply_fixes(current, fixable, report)
        if list(new_lines) == list(current.raw_lines):
            break
        current = parse_diagram(current.kind, "\n".join(new_lines))
    report.unresolved = [x for x in validate(current, actor_names)
                         if x.severity == "error"]
    return current, report


def _apply_fixes(d: DiagramScript, fixable, report: RepairReport):
    lines = list(d.raw_lines)
    drop: set[int] = set()
    rules = {x.rule for x in fixable}
    recorded: set[tuple[str, int]] = set()

    def fix(rule, i, after):
        if (rule, i) in recorded:
            return
        recorded.add((rule, i))
        report.applied.append(Repair(rule, i, lines[i], after))
        if after == "":
            drop.add(i)
        else:
            lines[i] = after

    for x in fixable:
        if x.rule in ("uc-subgraph", "sm-compound", "cd-slash-line"):
            fix(x.rule, x.line, "")
        elif x.rule == "sm-semicolon":
            fix(x.rule, x.line, lines[x.line].replace(";", "."))
        elif x.rule == "uc-header":
            fix(x.rule, x.line, "graph LR")
        elif x.rule == "sm-missing-name":
            name = d.name or "Unknown"
            lines.insert(0, f"%% Name: {name}")
            report.applied.append(Repair(x.rule, 0, "", f"%% Name: {name}"))
            return lines  # indices shifted; next pass handles the rest
        elif x.rule == "uc-actor-brackets":
            before = lines[x.line]
            after = _strip_actor_brackets(before)
            if after != before:
                fix(x.rule, x.line, after)
        elif x.rule == "uc-actor-actor-edge":
            for i, ln in enumerate(lines):
                if _UC_EDGE_RE.match(ln.strip()) and _is_actor_actor(d, ln):
                    fix(x.rule, i, "")
        elif x.rule == "sm-missing-note":
            state = x.message.split()[1]
            lines.append(f"note left of {state} : {state} state. (placeholder, please edit)")
            report.applied.append(Repair(x.rule, len(lines) - 1, "",
                                         f"note left of {state} : placeholder"))
        elif x.rule in ("sm-no-entry", "sm-no-exit"):
            state = x.message.split()[1]
            for i, ln in enumerate(lines):
                s = ln.strip()
                m = _SM_TRANSITION_RE.match(s.replace(";", "."))
                if m and state in (m.group(1), m.group(2)):
                    fix(x.rule, i, "")
                elif _NOTE_RE.match(s) and _NOTE_RE.match(s).group(2).strip() == state:
                    fix(x.rule, i, "")
        elif x.rule == "cd-getter-setter":
            for i, ln in enumerate(lines):
                if ln.strip() and ln.strip() == d.raw_lines[x.line].strip() and i == x.line:
                    fix(x.rule, i, "")
        elif x.rule in ("cd-dup-class", "cd-artificial-lab-dup"):
            name = "ArtificialLab" if x.rule.endswith("dup") and "ArtificialLab" in x.message \
                else x.message.split()[-1]
            _drop_later_class_block(lines, d, name, fix)
        elif x.rule == "sq-participant-actor":
            fix(x.rule, x.line,
                lines[x.line].replace("participant", "actor", 1))
    return [ln for i, ln in enumerate(lines) if i not in drop]


def _strip_actor_brackets(line: str) -> str:
    def clean(m):
        inner = m.group(2)
        for b in _BRACKETS:
            inner = inner.replace(b, "")
        inner = re.sub(r"\s{2,}", " ", inner).strip()
        return f"{m.group(1)}(({inner}))"

    return re.sub(r"(\w+)\(\((.*?)\)\)(?=\s|$|\s*--)", clean, line)


def _is_actor_actor(d: DiagramScript, line: str) -> bool:
    m = _UC_EDGE_RE.match(line.strip())
    if not m:
        return False
    ids = []
    for token in (m.group(1), m.group(3)):
        t = token.strip()
        mm = _ACTOR_NODE_RE.match(t) or _USECASE_NODE_RE.match(t)
        ids.append(mm.group(1) if mm else t)
    kinds = {n.id: n.kind for n in d.nodes}
    return kinds.get(ids[0]) == "actor" and kinds.get(ids[1]) == "actor"


def _drop_later_class_block(lines, d, name, fix):
    seen_first = False
    i = 0
    while i < len(lines):
        s = lines[i].strip()
        m = _CLASS_OPEN_RE.match(s) or _CLASS_ONE_RE.match(s)
        if m and m.group(1) == name:
            if not seen_first:
                seen_first = True
            else:
                end = i
                if s.endswith("{"):
                    while end < len(lines) and lines[end].strip() != "}":
                        end += 1
                for j in range(i, min(end + 1, len(lines))):
                    fix("cd-dup-class", j, "")
                i = end
        i += 1


# ---------------------------------------------------------------------------
# Emission

def emit(d: DiagramScript, actor_names: set[str] | None = None) -> str:
    errors = [x for x in validate(d, actor_names) if x.severity == "error"]
    if errors:
        raise UnresolvedErrors(f"{len(errors)} error diagnostics outstanding")
    emitter = {USECASE: _emit_usecase, CLASS: _emit_class,
               STATE: _emit_state, SEQUENCE: _emit_sequence}[d.kind]
    return emitter(d)


def _emit_usecase(d: DiagramScript) -> str:
    out = ["graph LR"]
    for n in d.nodes:
        if n.kind == "actor":
            out.append(f"{n.id}(({n.label}))")
        elif n.kind == "usecase":
            out.append(f"{n.id}([{n.label}])")
    for e in d.edges:
        arrow = f"-->|{e.label}|" if e.label else "-->"
        out.append(f"{e.src} {arrow} {e.dst}")
    return "\n".join(out)


def _emit_state(d: DiagramScript) -> str:
    out = [f"%% Name: {d.name or 'Unknown'}", "stateDiagram-v2"]
    for e in d.edges:
        if e.kind != "transition":
            continue
        label = f": {e.label}" if e.label else ""
        out.append(f"{e.src} --> {e.dst}{label}")
    for n in d.notes:
        out.append(f"note {n.placement} {n.target} : {n.text}")
    return "\n".join(out)


def _emit_class(d: DiagramScript) -> str:
    out = ["classDiagram"]
    for n in d.nodes:
        if n.members:
            out.append(f"class {n.id} {{")
            out.extend(n.members)
            out.append("}")
        else:
            out.append(f"class {n.id}")
    return "\n".join(out)


def _emit_sequence(d: DiagramScript) -> str:
    out = ["sequenceDiagram"]
    for n in d.nodes:
        out.append(f"{n.kind} {n.id}")
    for note in d.notes:
        out.append(f"Note {note.placement} {note.target}: {note.text}")
    for e in d.edges:
        if e.kind == "message":
            out.append(f"{e.src}->>{e.dst}: {e.label}")
        elif e.kind == "activation":
            out.append(f"{e.label} {e.src}")
    return "\n".join(out)
