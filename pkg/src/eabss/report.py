"""Plaintext-table parsing, report schema checks and report assembly.

The final artefact of a session is a conceptual-model report with one
section per framework step.  Sections are filled from the memorised
keys; tables are re-parsed from the replies, diagrams re-validated, and
the automatable rubric checks run over the result.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, asdict

from . import diagrams as dg
from .errors import MissingSection, NoTableFound, RaggedRow, UnknownFormat

STEPS = (
    "Problem Statement",
    "Study Outline",
    "Model Scope",
    "Key Activities",
    "Archetypes",
    "Agent & Object Templates",
    "Interactions",
    "Artificial Lab",
)

CATEGORIES = ("Actors", "Physical Environment", "Social Aspects",
              "Psychological Aspects", "Misc")
SCALES = ("Nominal", "Ordinal", "Ratio")

CRITERIA = ("Usability", "Generality", "Pertinency", "Readability",
            "Conformity", "Believability", "Originality")
MANUAL_ONLY = ("Believability", "Originality")


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    severity: str = "error"  # error | warning

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Plaintext tables


@dataclass(frozen=True)
class PlainTable:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def column(self, name: str) -> int:
        for i, h in enumerate(self.header):
            if h.strip().lower() == name.strip().lower():
                return i
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"header": list(self.header), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data: dict) -> "PlainTable":
        return cls(tuple(data["header"]), tuple(tuple(r) for r in data["rows"]))


_SEPARATOR_RE = re.compile(r"^[\s|:+-]+$")


def parse_plain_table(text: str) -> PlainTable:
    """Extract the first pipe- or column-aligned table from free text."""
    lines = text.splitlines()
    piped = [(i, ln) for i, ln in enumerate(lines) if ln.count("|") >= 2]
    if piped:
        cells_per_line = []
        for i, ln in enumerate(lines):
            if ln.count("|") < 2:
                continue
            if _SEPARATOR_RE.match(ln):
                continue
            stripped = ln.strip().strip("|")
            cells_per_line.append((i, tuple(c.strip() for c in stripped.split("|"))))
        if not cells_per_line:
            raise NoTableFound("only separator rows present")
        header = cells_per_line[0][1]
        rows = []
        for i, cells in cells_per_line[1:]:
            if len(cells) != len(header):
                raise RaggedRow(i)
            rows.append(cells)
        return PlainTable(header, tuple(rows))

    # column-aligned: cells separated by runs of 2+ spaces
    candidates = [(i, ln) for i, ln in enumerate(lines)
                  if re.search(r"\S\s{2,}\S", ln)]
    if not candidates:
        raise NoTableFound("no table delimiters in text")
    header = tuple(c.strip() for c in re.split(r"\s{2,}", candidates[0][1].strip()))
    rows = []
    for i, ln in candidates[1:]:
        cells = tuple(c.strip() for c in re.split(r"\s{2,}", ln.strip()))
        if len(cells) != len(header):
            raise RaggedRow(i)
        rows.append(cells)
    return PlainTable(header, tuple(rows))


# ---------------------------------------------------------------------------
# Scope table


@dataclass(frozen=True)
class ScopeRow:
    category: str
    sub_category: str
    explanation: str
    justification: str


_CATEGORY_ALIASES = {
    "actor": "Actors", "actors": "Actors",
    "physical environment": "Physical Environment",
    "social aspect": "Social Aspects", "social aspects": "Social Aspects",
    "psychological aspect": "Psychological Aspects",
    "psychological aspects": "Psychological Aspects",
    "misc": "Misc", "miscellaneous": "Misc",
}


def normalize_category(raw: str) -> str | None:
    return _CATEGORY_ALIASES.get(raw.strip().lower())


def scope_rows(t: PlainTable) -> list[ScopeRow]:
    try:
        cat = t.column("Category")
    except KeyError:
        cat = 0
    try:
        sub = t.column("Sub-Category")
    except KeyError:
        sub = min(1, len(t.header) - 1)
    rows = []
    for r in t.rows:
        explanation = r[2] if len(r) > 2 else ""
        justification = r[3] if len(r) > 3 else ""
        rows.append(ScopeRow(normalize_category(r[cat]) or r[cat].strip(),
                             r[sub], explanation, justification))
    return rows


def check_scope_table(t: PlainTable, actors: tuple[str, ...] = ()) -> list[Finding]:
    """Schema checks over the 15-element scope table."""
    findings = []
    rows = scope_rows(t)
    if len(rows) != 15:
        findings.append(Finding("scope-row-count",
                                f"expected 15 rows, found {len(rows)}"))
    by_category: dict[str, list[ScopeRow]] = {c: [] for c in CATEGORIES}
    for row in rows:
        if row.category not in by_category:
            findings.append(Finding("scope-unknown-category",
                                    f"unknown category {row.category!r}"))
        else:
            by_category[row.category].append(row)
    actor_subs = " ".join(r.sub_category.lower() for r in by_category["Actors"])
    for actor in actors:
        if actor.lower() not in actor_subs:
            findings.append(Finding("scope-actor-missing",
                                    f"actor {actor!r} not present in Actors rows"))
    for category in CATEGORIES[1:]:
        if len(by_category[category]) < 2:
            findings.append(Finding(
                "scope-category-minimum",
                f"at least 2 {category} rows required, found {len(by_category[category])}"))
    seen: dict[str, str] = {}
    for row in rows:
        sub = row.sub_category.strip().lower()
        if sub in seen and seen[sub] != row.category:
            findings.append(Finding(
                "scope-duplicate-sub-category",
                f"{row.sub_category!r} appears under both {seen[sub]} and {row.category}"))
        seen.setdefault(sub, row.category)
    return findings


# ---------------------------------------------------------------------------
# Experimental factors


@dataclass(frozen=True)
class ExperimentalFactor:
    name: str
    scale: str
    value_range: str = ""

    def __post_init__(self):
        if self.scale not in SCALES + ("Unknown",):
            raise ValueError(f"unknown scale: {self.scale}")

    def to_dict(self) -> dict:
        return asdict(self)


_SCALE_RE = re.compile(r"\b(nominal|ordinal|ratio)\b(?:\s+scale)?", re.IGNORECASE)
_FACTOR_LINE_RE = re.compile(r"^\s*(?:\d+[.)]\s*|[-*]\s*)?(.+)$")


def parse_factors(text: str) -> list[ExperimentalFactor]:
    """Pull named factors with their scales out of a Study Outline reply."""
    factors = []
    for line in text.splitlines():
        if not line.strip():
            continue
        m = _SCALE_RE.search(line)
        if not m:
            continue
        body = _FACTOR_LINE_RE.match(line).group(1).strip()
        scale = m.group(1).capitalize()
        name = re.split(r"\s*[(:]", body, maxsplit=1)[0].strip()
        value_range = ""
        vr = re.search(r"(?:Value Range|Range)\s*:?\s*(.+)$", body, re.IGNORECASE)
        if vr:
            value_range = vr.group(1).strip()
        elif ":" in body:
            value_range = body.split(":", 1)[1].strip()
        factors.append(ExperimentalFactor(name, scale, value_range))
    return factors


def check_factor_scales(factors: list[ExperimentalFactor]) -> list[Finding]:
    findings = []
    if len(factors) != 3:
        findings.append(Finding("factor-count",
                                f"expected 3 experimental factors, found {len(factors)}"))
    counts = {s: 0 for s in SCALES}
    for f in factors:
        if f.scale in counts:
            counts[f.scale] += 1
        else:
            findings.append(Finding("factor-scale-unknown",
                                    f"factor {f.name!r} has no recognised scale"))
    for scale, n in counts.items():
        if n == 0:
            findings.append(Finding("factor-scale-missing", f"no {scale} factor"))
        elif n > 1:
            findings.append(Finding("factor-scale-duplicate",
                                    f"{n} factors use the {scale} scale"))
    return findings


# ---------------------------------------------------------------------------
# Report document


@dataclass(frozen=True)
class DiagramEmbed:
    kind: str
    text: str
    valid: bool
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "text": self.text, "valid": self.valid,
                "diagnostics": list(self.diagnostics)}

    @classmethod
    def from_dict(cls, data: dict) -> "DiagramEmbed":
        return cls(data["kind"], data["text"], data["valid"],
                   tuple(data["diagnostics"]))


@dataclass
class Section:
    step: str
    prose: list[str] = field(default_factory=list)
    tables: list[PlainTable] = field(default_factory=list)
    diagrams: list[DiagramEmbed] = field(default_factory=list)
    definitions: dict[str, str] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not (self.prose or self.tables or self.diagrams or self.definitions)

    def to_dict(self) -> dict:
        return {"step": self.step, "prose": list(self.prose),
                "tables": [t.to_dict() for t in self.tables],
                "diagrams": [d.to_dict() for d in self.diagrams],
                "definitions": dict(self.definitions)}

    @classmethod
    def from_dict(cls, data: dict) -> "Section":
        return cls(data["step"], list(data["prose"]),
                   [PlainTable.from_dict(t) for t in data["tables"]],
                   [DiagramEmbed.from_dict(d) for d in data["diagrams"]],
                   dict(data["definitions"]))


@dataclass
class RubricEntry:
    findings: list[Finding] = field(default_factory=list)
    manual_rating: int | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {"findings": [f.to_dict() for f in self.findings],
                "manual_rating": self.manual_rating, "notes": self.notes}

    @classmethod
    def from_dict(cls, data: dict) -> "RubricEntry":
        return cls([Finding(**f) for f in data["findings"]],
                   data["manual_rating"], data["notes"])


@dataclass
class RubricSheet:
    entries: dict[str, RubricEntry] = field(
        default_factory=lambda: {c: RubricEntry() for c in CRITERIA})

    def add_finding(self, criterion: str, finding: Finding):
        if criterion in MANUAL_ONLY:
            raise ValueError(f"{criterion} is rated manually, not by findings")
        self.entries[criterion].findings.append(finding)

    def set_rating(self, criterion: str, rating: int, notes: str = ""):
        if criterion not in self.entries:
            raise KeyError(criterion)
        if not 1 <= rating <= 5:
            raise ValueError("rating must be between 1 and 5")
        self.entries[criterion].manual_rating = rating
        if notes:
            self.entries[criterion].notes = notes

    def findings(self, criterion: str) -> list[Finding]:
        return self.entries[criterion].findings

    def to_dict(self) -> dict:
        return {c: e.to_dict() for c, e in self.entries.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "RubricSheet":
        return cls({c: RubricEntry.from_dict(e) for c, e in data.items()})


SCHEMA_VERSION = 1


@dataclass
class ReportDocument:
    sections: dict[str, Section]
    conclusion: str
    rubric: RubricSheet
    meta: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION,
                "sections": {k: s.to_dict() for k, s in self.sections.items()},
                "conclusion": self.conclusion,
                "rubric": self.rubric.to_dict(),
                "meta": dict(self.meta)}

    @classmethod
    def from_dict(cls, data: dict) -> "ReportDocument":
        return cls({k: Section.from_dict(s) for k, s in data["sections"].items()},
                   data["conclusion"], RubricSheet.from_dict(data["rubric"]),
                   dict(data["meta"]))


# ---------------------------------------------------------------------------
# Soft word limits

SOFT_WORD_LIMITS = {"title": 12, "aim": 40, "context": 200, "conclusion": 300}
SOFT_ITEM_LIMITS = {"keywords": 5, "stakeholders": 5}
LIMIT_TOLERANCE = 1.2


def _count_items(text: str) -> int:
    numbered = re.findall(r"^\s*\d+[.)]\s+", text, re.MULTILINE)
    if numbered:
        return len(numbered)
    if "," in text and "\n" not in text.strip():
        return len([p for p in text.split(",") if p.strip()])
    return len([ln for ln in text.splitlines() if ln.strip()])


def check_word_limits(report: ReportDocument) -> list[Finding]:
    """Soft limits only: a Warning when a field exceeds limit x 1.2."""
    findings = []
    for name, limit in SOFT_WORD_LIMITS.items():
        text = report.conclusion if name == "conclusion" else report.meta.get(name, "")
        if not text:
            continue
        words = len(text.split())
        if words > limit * LIMIT_TOLERANCE:
            findings.append(Finding(
                "word-limit", f"{name} has {words} words, soft limit {limit} "
                f"(tolerated up to {math.floor(limit * LIMIT_TOLERANCE)})", "warning"))
    for name, limit in SOFT_ITEM_LIMITS.items():
        text = report.meta.get(name, "")
        if not text:
            continue
        items = _count_items(text)
        if items > limit * LIMIT_TOLERANCE:
            findings.append(Finding(
                "item-limit", f"{name} lists {items} items, soft limit {limit}",
                "warning"))
    return findings


# ---------------------------------------------------------------------------
# Assembly

# which memorised keys fill which step, in presentation order
_STEP_KEYS = {
    "Problem Statement": ("key-topic", "key-context", "key-stakeholders",
                          "key-keywords", "key-title", "key-aim"),
    "Study Outline": ("key-objectives", "key-hypotheses",
                      "key-experimentalFactors", "key-outputs"),
    "Model Scope": ("key-umlActors", "key-explanations", "key-modelScope",
                    "key-implementationModels"),
    "Key Activities": ("key-umlUserStories", "key-umlUseCases",
                       "key-umlUseCaseTable", "key-mermaidKeyActivitiesScript"),
    "Archetypes": ("key-categorisationSchemata",),
    "Agent & Object Templates": ("key-mermaidClassDiagramScript",
                                 "key-mermaidStateMachineDiagramsScript",
                                 "key-stateVariablesTable",
                                 "key-stateTransitionsTable"),
    "Interactions": ("key-mermaidSequenceDiagramScript",),
}

_TABLE_KEYS = {"key-modelScope", "key-implementationModels", "key-umlUseCaseTable",
               "key-categorisationSchemata", "key-stateVariablesTable",
               "key-stateTransitionsTable"}

_DIAGRAM_KEYS = {
    "key-mermaidKeyActivitiesScript": dg.USECASE,
    "key-mermaidClassDiagramScript": dg.CLASS,
    "key-mermaidStateMachineDiagramsScript": dg.STATE,
    "key-mermaidSequenceDiagramScript": dg.SEQUENCE,
}

_META_KEYS = {"title": "key-title", "aim": "key-aim", "context": "key-context",
              "keywords": "key-keywords", "stakeholders": "key-stakeholders"}


def split_state_machines(text: str) -> list[str]:
    """One combined reply may hold several state machines, one per actor."""
    blocks, current = [], []
    for line in text.splitlines():
        if line.strip().startswith("%% Name:") and current:
            blocks.append("\n".join(current).strip())
            current = []
        current.append(line)
    if current:
        blocks.append("\n".join(current).strip())
    return [b for b in blocks if b]


def _embed_diagram(kind: str, text: str) -> DiagramEmbed:
    try:
        d = dg.parse_diagram(kind, text)
        diags = dg.validate(d)
    except Exception as exc:  # unparseable scripts fall back to raw text
        return DiagramEmbed(kind, text, False, (str(exc),))
    errors = [x for x in diags if x.severity == "error"]
    if errors:
        return DiagramEmbed(kind, text, False,
                            tuple(f"{x.rule}: {x.message}" for x in errors))
    return DiagramEmbed(kind, text, True)


def _fill_section(section: Section, key: str, value: str):
    if key in _DIAGRAM_KEYS:
        kind = _DIAGRAM_KEYS[key]
        texts = split_state_machines(value) if kind == dg.STATE else [value]
        for text in texts:
            section.diagrams.append(_embed_diagram(kind, text))
    elif key in _TABLE_KEYS:
        try:
            section.tables.append(parse_plain_table(value))
        except (NoTableFound, RaggedRow):
            section.prose.append(value)
    else:
        section.definitions[key] = value


def assemble_report(session, allow_partial: bool | None = None,
                    actors: tuple[str, ...] = ()) -> ReportDocument:
    """Build the report from a finished (or explicitly partial) session."""
    from .engine import COMPLETE  # local import to avoid a cycle

    if allow_partial is None:
        allow_partial = getattr(session.options, "allow_partial", False)
    if session.status != COMPLETE and not allow_partial:
        raise MissingSection(f"session is {session.status}, not complete")

    keys = session.keys
    rubric = RubricSheet()
    sections: dict[str, Section] = {}
    for step in STEPS:
        section = Section(step)
        for key in _STEP_KEYS.get(step, ()):
            if key in keys:
                _fill_section(section, key, keys.get(key).value)
        sections[step] = section

    # the Artificial Lab step is carried by the main class inside the class
    # diagram; surface that class block as the section body
    lab = _artificial_lab_block(keys)
    if lab:
        sections["Artificial Lab"].prose.append(lab)

    conclusion = keys.get("key-conclusion").value if "key-conclusion" in keys else ""

    meta = {}
    for name, key in _META_KEYS.items():
        if key in keys:
            meta[name] = keys.get(key).value

    for step in STEPS:
        if sections[step].empty:
            if not allow_partial:
                raise MissingSection(step)
            rubric.add_finding("Conformity",
                               Finding("conformity-missing-step",
                                       f"no content for step {step!r}"))
    if not conclusion:
        if not allow_partial:
            raise MissingSection("Conclusion")
        rubric.add_finding("Conformity",
                           Finding("conformity-missing-step", "no conclusion"))

    report = ReportDocument(sections, conclusion, rubric, meta)

    if "key-modelScope" in keys:
        try:
            table = parse_plain_table(keys.get("key-modelScope").value)
            for finding in check_scope_table(table, actors):
                rubric.add_finding("Pertinency", finding)
        except (NoTableFound, RaggedRow) as exc:
            rubric.add_finding("Pertinency",
                               Finding("scope-table-unparseable", str(exc)))
    if "key-experimentalFactors" in keys:
        factors = parse_factors(keys.get("key-experimentalFactors").value)
        for finding in check_factor_scales(factors):
            rubric.add_finding("Pertinency", finding)
    for finding in check_word_limits(report):
        rubric.add_finding("Readability", finding)
    return report


def _artificial_lab_block(keys) -> str:
    if "key-mermaidClassDiagramScript" not in keys:
        return ""
    text = keys.get("key-mermaidClassDiagramScript").value
    m = re.search(r"^\s*class ArtificialLab\s*\{.*?^\s*\}", text,
                  re.MULTILINE | re.DOTALL)
    return m.group(0).strip() if m else ""


# ---------------------------------------------------------------------------
# Export

FORMATS = ("md", "json")


def export(report: ReportDocument, format: str) -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    if format == "md":
        return _to_markdown(report)
    raise UnknownFormat(format)


def import_json(text: str) -> ReportDocument:
    return ReportDocument.from_dict(json.loads(text))


def _pipe_table(t: PlainTable) -> str:
    out = ["| " + " | ".join(t.header) + " |",
           "|" + "|".join(" --- " for _ in t.header) + "|"]
    for row in t.rows:
        out.append("| " + " | ".join(row) + " |")
    return "\n".join(out)


def _to_markdown(report: ReportDocument) -> str:
    lines = []
    title = report.meta.get("title")
    lines.append(f"# {title}" if title else "# Conceptual Model Report")
    lines.append("")
    for step, section in report.sections.items():
        lines.append(f"## {step}")
        lines.append("")
        for key, value in section.definitions.items():
            lines.append(f"**{key}**")
            lines.append("")
            lines.append(value)
            lines.append("")
        for prose in section.prose:
            lines.append(prose)
            lines.append("")
        for table in section.tables:
            lines.append(_pipe_table(table))
            lines.append("")
        for d in section.diagrams:
            if d.valid:
                lines.append("```mermaid")
                lines.append(d.text)
                lines.append("```")
            else:
                lines.append("```")
                lines.append(d.text)
                lines.append("```")
                lines.append("")
                lines.append("Diagnostics:")
                for diag in d.diagnostics:
                    lines.append(f"- {diag}")
            lines.append("")
    lines.append("## Conclusion")
    lines.append("")
    lines.append(report.conclusion)
    lines.append("")
    findings = [(c, f) for c in CRITERIA for f in report.rubric.findings(c)]
    if findings:
        lines.append("## Findings")
        lines.append("")
        for criterion, f in findings:
            lines.append(f"- **{criterion}** `{f.code}` ({f.severity}): {f.message}")
        lines.append("")
    return "\n".join(lines)
