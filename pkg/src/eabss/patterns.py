"""Parameterised prompt design patterns and the refinement prompt library.

Each pattern is an ordered list of pipe-separated command templates.  A
template carries the indices of the published pattern commands it covers,
so callers can assert which commands an expansion includes.  Slots are
``{name}`` placeholders; ``{key_ref}`` renders the memorised-key
placeholder in braces, everything else is plain text substitution.
"""

from __future__ import annotations

import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

from .errors import EmptyTarget, InvalidCount, UnboundSlot
from .script import KeyRef, Command, PromptChain, normalize_key, parse_command, parse_chain

GENERAL = "general"
CO_CREATION = "co_creation"
TABLE = "table"
DIAGRAM = "diagram"
PATTERN_KINDS = (GENERAL, CO_CREATION, TABLE, DIAGRAM)

REMOVE = "remove"
ADD = "add"
INCREASE_COMPLEXITY = "increase_complexity"
REFLECT = "reflect"
REFINEMENT_KINDS = (REMOVE, ADD, INCREASE_COMPLEXITY, REFLECT)


@dataclass(frozen=True)
class CommandTemplate:
    indices: tuple[int, ...]
    text: str
    optional: bool = False
    intervene: bool = False


_TABLE_RULES = (
    'Use TABLE format WITH "plaintext" and WITHOUT any code formatting. '
    'DO NOT use "\\n". IGNORE ALL space limitations'
)

PATTERNS: dict[str, tuple[CommandTemplate, ...]] = {
    GENERAL: (
        CommandTemplate((1,), "Take on the role of {role} with experience in {experience}"),
        CommandTemplate((2,), "Provide definitions of relevant terms in the context of the role adopted: {terms}"),
        CommandTemplate((3,), "Define {elements}"),
        CommandTemplate((4,), "The following requirements must be satisfied when choosing these elements: {requirements}", optional=True),
        CommandTemplate((5,), "Provide further specifications ({specifications}) for these elements"),
        CommandTemplate((6,), "Use provided output format: {output_format}", optional=True),
        CommandTemplate((7,), "Memorise details using a {key_ref}."),
        CommandTemplate((8,), "Add (or remove or change) {element_change} and update related memorised {key_name}.", intervene=True),
        CommandTemplate((9,), "Increase complexity and update related memorised {key_name}.", intervene=True),
    ),
    CO_CREATION: (
        CommandTemplate((1, 2, 3, 4), (
            "Play a co-creation role-play game in which all the memorised key-stakeholders "
            "discuss with each other potential {topic} for the study considering the pros and cons. "
            'Use a "debating tone". The moderator focuses on 1 novel RANDOM question. '
            "Provide the question and the details of the controversial discussion"
        )),
        CommandTemplate((5,), "Agree on {agree_count} potential {topic} that satisfy the view of all participating memorised key-stakeholders"),
        CommandTemplate((5,), "Memorise these potential {topic} as {key_ref}"),
        CommandTemplate((6,), "Propose {criteria_count} criteria for ranking the {agree_count} potential {topic} to support the decision which {decide_term} to carry forward", optional=True),
        CommandTemplate((7,), "Use provided output format: {output_format}", optional=True),
        CommandTemplate((8,), 'Use a "scientific tone".'),
    ),
    TABLE: (
        CommandTemplate((1,), "{table_rules}"),
        CommandTemplate((2, 3, 5, 6), (
            "Define {elements}. You ALWAYS must satisfy the following {req_count} requirements "
            "for defining {req_subject}: {requirements} {organisation}. "
            "Memorise these {memorise_label} as {key_ref}"
        )),
        CommandTemplate((5, 6), "{listing}. Memorise this table as {table_key_ref}.", optional=True),
        CommandTemplate((7,), "Add (or remove or change) {element_change} and update related memorised {key_name}.", intervene=True),
        CommandTemplate((8,), "Increase complexity and update related memorised {key_name}.", intervene=True),
    ),
    DIAGRAM: (
        CommandTemplate((1, 2, 3), (
            "Generate a script for a 'comprehensive {diagram_kind} diagram' in \"Mermaid.js\". "
            "{info_source}. You ALWAYS must satisfy the following {req_count} requirements "
            "for defining the {req_subject}: {requirements}"
        )),
        CommandTemplate((4,), "Increase complexity and add additional features: {extra_features}", optional=True),
        CommandTemplate((5,), "Critically reflect and improve the script based on your reflection", optional=True),
        CommandTemplate((6,), "{format_guidance}. Memorise this mermaid.js script as {key_ref}."),
        CommandTemplate((7,), "Add (or remove or change) {element_change} and update related memorised {key_name}.", intervene=True),
        CommandTemplate((8,), "Increase complexity and update related memorised {key_name}.", intervene=True),
    ),
}

_OPTIONAL_INDICES = {
    kind: frozenset(i for t in templates if t.optional for i in t.indices)
    for kind, templates in PATTERNS.items()
}

_COUNT_SLOTS = ("agree_count", "criteria_count", "req_count", "element_count")


@dataclass(frozen=True)
class PatternInstance:
    kind: str
    slots: dict[str, object] = field(default_factory=dict)
    include_optional: frozenset[int] = frozenset()
    include_intervene: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise ValueError(f"unknown pattern kind: {self.kind}")


@dataclass(frozen=True)
class PlannedCommand:
    indices: tuple[int, ...]
    text: str
    intervene: bool = False


_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")


def _render_requirements(items) -> str:
    if isinstance(items, str):
        return items
    return " ".join(f"{i}) {item}" for i, item in enumerate(items, start=1))


def _resolve_slots(instance: PatternInstance) -> dict[str, str]:
    slots = dict(instance.slots)
    for name in _COUNT_SLOTS:
        if name in slots and not isinstance(slots[name], str):
            if not isinstance(slots[name], int) or slots[name] <= 0:
                raise InvalidCount(f"{name} must be a positive integer, got {slots[name]!r}")
    if "requirements" in slots:
        reqs = slots["requirements"]
        slots.setdefault("req_count", len(reqs) if not isinstance(reqs, str) else "")
        slots["requirements"] = _render_requirements(reqs)
    if "key_name" in slots:
        key = normalize_key(str(slots["key_name"]))
        slots["key_name"] = str(KeyRef(key))
        slots["key_ref"] = "{%s}" % key
    if "table_key" in slots:
        slots["table_key_ref"] = "{%s}" % normalize_key(str(slots["table_key"]))
    slots.setdefault("table_rules", _TABLE_RULES)
    slots.setdefault("decide_term", slots.get("topic", ""))
    if "extra_features" in slots and not isinstance(slots["extra_features"], str):
        slots["extra_features"] = ", ".join(slots["extra_features"])
    if "specifications" in slots and not isinstance(slots["specifications"], str):
        slots["specifications"] = ", ".join(slots["specifications"])
    return {k: str(v) for k, v in slots.items()}


def plan(instance: PatternInstance) -> list[PlannedCommand]:
    """Resolve the instance against its pattern, in published command order."""
    slots = _resolve_slots(instance)
    planned = []
    for tmpl in PATTERNS[instance.kind]:
        if tmpl.optional and not (set(tmpl.indices) & instance.include_optional):
            continue
        if tmpl.intervene and not (set(tmpl.indices) & instance.include_intervene):
            continue
        needed = _PLACEHOLDER_RE.findall(tmpl.text)
        missing = [n for n in needed if n not in slots]
        if missing:
            raise UnboundSlot(missing[0])
        text = _PLACEHOLDER_RE.sub(lambda m: slots[m.group(1)], tmpl.text)
        leftover = [b for b in re.findall(r"\{[^}]*\}", text) if not b.startswith("{key-")]
        if leftover:
            raise UnboundSlot(leftover[0])
        planned.append(PlannedCommand(tmpl.indices, text, tmpl.intervene))
    return planned


def expand(instance: PatternInstance) -> PromptChain:
    """Expand into the main prompt chain (intervene commands excluded)."""
    texts = [p.text for p in plan(instance) if not p.intervene]
    return parse_chain("| ".join(texts))


def expand_with_interventions(instance: PatternInstance) -> list[PromptChain]:
    """Main chain first, then one intervene-flagged chain per INTERVENE command."""
    chains = [expand(instance)]
    for p in plan(instance):
        if p.intervene:
            chains.append(parse_chain("[intervene] " + p.text))
    return chains


# ---------------------------------------------------------------------------
# Refinement prompt library

_REFINEMENT_FORMULAS = {
    REMOVE: "Remove {target}. Update the memorised {key}.",
    ADD: "Add {target}. Update the memorised {key}.",
    INCREASE_COMPLEXITY: "Increase complexity. Update the memorised {key}.",
    REFLECT: "Critically reflect and improve {target} based on your reflection. Update the memorised {key}.",
}


def refinement(kind: str, target: str, key: KeyRef | str) -> Command:
    if kind not in REFINEMENT_KINDS:
        raise ValueError(f"unknown refinement kind: {kind}")
    if kind in (REMOVE, ADD) and not target.strip():
        raise EmptyTarget(f"{kind} refinement needs a target")
    key_name = key.name if isinstance(key, KeyRef) else str(KeyRef(normalize_key(key)))
    text = _REFINEMENT_FORMULAS[kind].format(target=target, key=key_name)
    return parse_command(text)


# ---------------------------------------------------------------------------
# Chat preparation

@dataclass(frozen=True)
class GenerationDefaults:
    temperature: float = 1.8
    top_p: float = 0.9
    default_role: tuple[str, str] = ("Sociologist", "Agent-Based Social Simulation")
    default_tone: str = "scientific tone"

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p out of range: {self.top_p}")


def preparation_chain(defaults: GenerationDefaults = GenerationDefaults()) -> PromptChain:
    role, experience = defaults.default_role
    text = (
        "You are ChatGPT, a language model developed by OpenAI. "
        "Consider the ENTIRE conversation history to provide 'accurate and coherent responses'. "
        f"Use Temperature TEMP {defaults.temperature} AND Top_p NUCLEUS SAMPLING {defaults.top_p} "
        "during the entire conversation. "
        "Use clear, precise language during the entire conversation. "
        "Prioritise substance during the entire conversation"
        f'| Take on the "role" of a "{role}" with experience in "{experience}" '
        "during the entire conversation, unless instructed otherwise. "
        f'Use a "{defaults.default_tone}" during the entire conversation, unless instructed otherwise'
        "| Step-by-step, work through the following task list in the given order "
        'during the entire conversation. Got it? Say "yes" or say "no".'
    )
    return parse_chain(text)


# ---------------------------------------------------------------------------
# Declarative instance files

def load_instances(path) -> dict[str, PatternInstance]:
    """Load pattern instances from a TOML file with one table per instance."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    instances = {}
    for name, section in data.get("instances", data).items():
        if not isinstance(section, dict):
            continue
        kind = section.pop("kind")
        include_optional = frozenset(section.pop("include_optional", ()))
        include_intervene = frozenset(section.pop("include_intervene", ()))
        slots = section.pop("slots", section)
        instances[name] = PatternInstance(kind, dict(slots), include_optional, include_intervene)
    return instances
