"""Mermaid subset: parsing, validation rules, sound auto-repair."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from eabss import diagrams as dg
from eabss import museum
from eabss.errors import MissingHeader, UnresolvedErrors


GOOD_USECASE = """graph LR
A1((Visitor))
U1([Explore exhibits])
U2([Give feedback])
A1 -->|walks through| U1
U2 -->|extends| U1
"""

GOOD_STATE = """%% Name: Visitor
stateDiagram-v2
[*] --> Idle
Idle --> Moving: timeout
Moving --> Idle: condition
Moving --> [*]
note left of Idle : Waiting between exhibits.
note right of Moving : Walking to the next exhibit.
"""

GOOD_CLASS = """classDiagram
class ArtificialLab {
  +visitors : Visitor[]
  +summaryStatistics()
}
class Visitor {
  +satisfaction : float
}
"""

GOOD_SEQUENCE = """sequenceDiagram
actor The Visitor
participant Exhibit
The Visitor->>+Exhibit: inspect
Exhibit->>-The Visitor: respond
Note over The Visitor: decides next move
"""


def errors(diags):
    return sorted({x.rule for x in diags if x.severity == "error"})


# ---------------------------------------------------------------------------
# parsing


def test_parse_usecase_nodes_and_edges():
    d = dg.parse_diagram(dg.USECASE, GOOD_USECASE)
    kinds = {n.id: n.kind for n in d.nodes}
    assert kinds == {"A1": "actor", "U1": "usecase", "U2": "usecase"}
    assert dg.Edge("A1", "U1", "walks through") in d.edges


def test_parse_usecase_inline_node_definitions():
    d = dg.parse_diagram(dg.USECASE, "graph LR\nA((Guard)) -->|watches| B([Patrol])")
    assert d.node("A").kind == "actor"
    assert d.node("B").kind == "usecase"
    assert d.edges == (dg.Edge("A", "B", "watches"),)


def test_parse_state_name_and_transitions():
    d = dg.parse_diagram(dg.STATE, GOOD_STATE)
    assert d.name == "Visitor"
    assert dg.Edge("Idle", "Moving", "timeout", "transition") in d.edges
    assert {n.target for n in d.notes} == {"Idle", "Moving"}


def test_parse_class_members():
    d = dg.parse_diagram(dg.CLASS, GOOD_CLASS)
    lab = d.node("ArtificialLab")
    assert "+summaryStatistics()" in [m.strip() for m in lab.members]


def test_parse_sequence_decls_and_activations():
    d = dg.parse_diagram(dg.SEQUENCE, GOOD_SEQUENCE)
    kinds = {n.id: n.kind for n in d.nodes}
    assert kinds["The Visitor"] == "actor"
    assert kinds["Exhibit"] == "participant"
    acts = [e for e in d.edges if e.kind == "activation"]
    assert len(acts) == 2  # one +, one -


def test_missing_header():
    with pytest.raises(MissingHeader):
        dg.parse_diagram(dg.USECASE, "flowchart TD\nA --> B")
    with pytest.raises(MissingHeader):
        dg.parse_diagram(dg.STATE, "")


def test_unknown_kind():
    with pytest.raises(ValueError):
        dg.parse_diagram("er", "graph LR")


# ---------------------------------------------------------------------------
# validation: use case rules


def test_good_usecase_is_clean():
    assert errors(dg.validate(dg.parse_diagram(dg.USECASE, GOOD_USECASE))) == []


def test_uc_wrong_header():
    d = dg.parse_diagram(dg.USECASE, GOOD_USECASE.replace("graph LR", "graph TD"))
    assert "uc-header" in errors(dg.validate(d))


def test_uc_unlinked_actor():
    d = dg.parse_diagram(dg.USECASE, "graph LR\nA1((Visitor))\nU1([Look])\nU2([See])\nU2 -->|x| U1")
    assert "uc-actor-unlinked" in errors(dg.validate(d))


def test_uc_unlinked_usecase():
    d = dg.parse_diagram(dg.USECASE, "graph LR\nA1((V))\nU1([Look])\nU2([See])\nA1 -->|x| U1")
    assert "uc-usecase-unlinked" in errors(dg.validate(d))


def test_uc_usecase_pointing_at_usecase_is_linked():
    text = "graph LR\nA1((V))\nU1([Look])\nU2([See])\nA1 -->|x| U1\nU2 -->|y| U1"
    assert errors(dg.validate(dg.parse_diagram(dg.USECASE, text))) == []


def test_uc_actor_actor_edge():
    text = GOOD_USECASE + "A2((Guide))\nA1 -->|talks to| A2\nA2 -->|guides| U1"
    assert "uc-actor-actor-edge" in errors(dg.validate(dg.parse_diagram(dg.USECASE, text)))


def test_uc_actor_brackets():
    d = dg.parse_diagram(dg.USECASE, GOOD_USECASE.replace("Visitor", "Visitor (human)"))
    assert "uc-actor-brackets" in errors(dg.validate(d))


def test_uc_subgraph():
    text = "graph LR\nsubgraph museum\nA((V)) -->|x| U([Look])\nend"
    assert "uc-subgraph" in errors(dg.validate(dg.parse_diagram(dg.USECASE, text)))


# ---------------------------------------------------------------------------
# validation: state rules


def test_good_state_is_clean():
    assert errors(dg.validate(dg.parse_diagram(dg.STATE, GOOD_STATE))) == []


def test_sm_missing_name_comment():
    text = "\n".join(GOOD_STATE.splitlines()[1:])
    assert "sm-missing-name" in errors(dg.validate(dg.parse_diagram(dg.STATE, text)))


def test_sm_no_start():
    text = GOOD_STATE.replace("[*] --> Idle\n", "")
    diags = errors(dg.validate(dg.parse_diagram(dg.STATE, text)))
    assert "sm-no-start" in diags


def test_sm_missing_note():
    text = GOOD_STATE.replace("note left of Idle : Waiting between exhibits.\n", "")
    assert "sm-missing-note" in errors(dg.validate(dg.parse_diagram(dg.STATE, text)))


def test_sm_semicolons():
    text = GOOD_STATE.replace("Waiting between exhibits.", "Waiting; between exhibits;")
    assert "sm-semicolon" in errors(dg.validate(dg.parse_diagram(dg.STATE, text)))


def test_sm_compound_state_block():
    text = GOOD_STATE + "state Busy {\nInner --> Deeper\n}\n"
    assert "sm-compound" in errors(dg.validate(dg.parse_diagram(dg.STATE, text)))


# ---------------------------------------------------------------------------
# validation: class rules


def test_good_class_is_clean():
    assert errors(dg.validate(dg.parse_diagram(dg.CLASS, GOOD_CLASS))) == []


def test_cd_missing_lab():
    text = GOOD_CLASS.replace("ArtificialLab", "Playground")
    assert "cd-artificial-lab" in errors(dg.validate(dg.parse_diagram(dg.CLASS, text)))


def test_cd_duplicate_lab():
    text = GOOD_CLASS + "class ArtificialLab {\n  +extra : int\n}\n"
    assert "cd-artificial-lab-dup" in errors(dg.validate(dg.parse_diagram(dg.CLASS, text)))


def test_cd_duplicate_class():
    text = GOOD_CLASS + "class Visitor {\n  +age : int\n}\n"
    assert "cd-dup-class" in errors(dg.validate(dg.parse_diagram(dg.CLASS, text)))


def test_cd_getter_setter():
    text = GOOD_CLASS.replace("+satisfaction : float",
                              "+getSatisfaction()\n  +setSatisfaction(v)")
    assert "cd-getter-setter" in errors(dg.validate(dg.parse_diagram(dg.CLASS, text)))


def test_cd_slash_line():
    text = GOOD_CLASS.replace("+satisfaction : float", "+speed : m/s")
    assert "cd-slash-line" in errors(dg.validate(dg.parse_diagram(dg.CLASS, text)))


# ---------------------------------------------------------------------------
# validation: sequence rules


def test_sequence_participant_warning_without_roster():
    d = dg.parse_diagram(dg.SEQUENCE, GOOD_SEQUENCE)
    diags = dg.validate(d)
    assert errors(diags) == []
    assert any(x.rule == "sq-participant" and x.severity == "warning" for x in diags)


def test_sequence_participant_error_with_roster():
    text = GOOD_SEQUENCE.replace("actor The Visitor", "participant The Visitor")
    d = dg.parse_diagram(dg.SEQUENCE, text)
    assert "sq-participant-actor" in errors(dg.validate(d, {"The Visitor"}))


def test_sequence_unbalanced_activation():
    text = GOOD_SEQUENCE.replace("Exhibit->>-The Visitor: respond",
                                 "Exhibit->>The Visitor: respond")
    d = dg.parse_diagram(dg.SEQUENCE, text)
    assert "sq-unbalanced-activation" in errors(dg.validate(d))


def test_sequence_explicit_activate_deactivate_balance():
    text = ("sequenceDiagram\nactor A\nparticipant B\nactivate B\n"
            "A->>B: ask\ndeactivate B\n")
    assert errors(dg.validate(dg.parse_diagram(dg.SEQUENCE, text))) == []


# ---------------------------------------------------------------------------
# repair soundness


def node_ids(d):
    return {n.id for n in d.nodes}


def edge_set(d):
    return {(e.src, e.dst, e.label) for e in d.edges}


REPAIRABLE = [
    (dg.USECASE, GOOD_USECASE.replace("graph LR", "graph TD")),
    (dg.USECASE, GOOD_USECASE.replace("Visitor", "Visitor [sic]")),
    (dg.USECASE, GOOD_USECASE + "A2((Guide))\nA1 -->|chats| A2\nA2 -->|guides| U1"),
    (dg.USECASE, "graph LR\nsubgraph s\nA((V)) -->|x| U([Look])\nend"),
    (dg.STATE, "\n".join(GOOD_STATE.splitlines()[1:])),
    (dg.STATE, GOOD_STATE.replace("Waiting between exhibits.", "Waiting; resting;")),
    (dg.STATE, GOOD_STATE + "state Busy {\nInner --> Deeper\n}"),
    (dg.STATE, GOOD_STATE.replace("note left of Idle : Waiting between exhibits.\n", "")),
    (dg.CLASS, GOOD_CLASS + "class Visitor {\n  +age : int\n}"),
    (dg.CLASS, GOOD_CLASS + "class ArtificialLab {\n  +extra : int\n}"),
    (dg.CLASS, GOOD_CLASS.replace("+satisfaction : float", "+getAge()\n  +ratio : a/b")),
    (dg.SEQUENCE, GOOD_SEQUENCE.replace("actor The Visitor", "participant The Visitor")),
]


@pytest.mark.parametrize("kind,text", REPAIRABLE)
def test_repair_resolves_fixable_rules(kind, text):
    original = dg.parse_diagram(kind, text)
    actors = {"The Visitor"} if kind == dg.SEQUENCE else None
    repaired, report = dg.repair(original, actors)
    assert report.unresolved == []
    assert report.applied  # something actually changed
    # emit raises on outstanding errors; repaired output must be emittable
    dg.emit(repaired, actors)


@pytest.mark.parametrize("kind,text", REPAIRABLE)
def test_repair_never_invents_nodes_or_edges(kind, text):
    original = dg.parse_diagram(kind, text)
    actors = {"The Visitor"} if kind == dg.SEQUENCE else None
    repaired, _ = dg.repair(original, actors)
    assert node_ids(repaired) <= node_ids(original)
    labels = {e.label for e in original.edges}
    for e in repaired.edges:
        if e.kind == "activation":
            continue  # bookkeeping rows derived from original arrows
        assert (e.src, e.dst, e.label) in edge_set(original) | {
            (e.src, e.dst, lb) for lb in labels}


@pytest.mark.parametrize("kind,text", REPAIRABLE)
def test_repair_is_idempotent(kind, text):
    actors = {"The Visitor"} if kind == dg.SEQUENCE else None
    once, _ = dg.repair(dg.parse_diagram(kind, text), actors)
    twice, second = dg.repair(once, actors)
    assert twice.raw_lines == once.raw_lines
    assert second.applied == []


def test_repair_reports_unfixable():
    # an unlinked actor cannot be repaired by rename/removal alone
    d = dg.parse_diagram(dg.USECASE, "graph LR\nA1((V))\nU1([Look])\nU1 -->|x| U2([See])")
    repaired, report = dg.repair(d)
    assert any(x.rule == "uc-actor-unlinked" for x in report.unresolved)
    with pytest.raises(UnresolvedErrors):
        dg.emit(repaired)


# ---------------------------------------------------------------------------
# emission


def test_emit_parse_fixpoint():
    for kind, text in [(dg.USECASE, GOOD_USECASE), (dg.STATE, GOOD_STATE),
                       (dg.CLASS, GOOD_CLASS)]:
        d = dg.parse_diagram(kind, text)
        emitted = dg.emit(d)
        again = dg.parse_diagram(kind, emitted)
        assert again.structure() == dg.parse_diagram(kind, dg.emit(again)).structure()
        assert node_ids(again) == node_ids(d)
        assert edge_set(again) == edge_set(d)


# ---------------------------------------------------------------------------
# bundled reference diagrams stay valid


def test_reference_diagrams_are_clean():
    assert errors(dg.validate(dg.parse_diagram(
        dg.USECASE, museum.SYNTHETIC_KEYS["key-mermaidKeyActivitiesScript"]))) == []
    assert errors(dg.validate(dg.parse_diagram(
        dg.CLASS, museum.SYNTHETIC_KEYS["key-mermaidClassDiagramScript"]))) == []
    assert errors(dg.validate(dg.parse_diagram(
        dg.SEQUENCE, museum.SYNTHETIC_KEYS["key-mermaidSequenceDiagramScript"]))) == []


def test_reference_state_machines_are_clean():
    from eabss.report import split_state_machines

    blocks = split_state_machines(
        museum.SYNTHETIC_KEYS["key-mermaidStateMachineDiagramsScript"])
    assert len(blocks) == 4
    for block in blocks:
        assert errors(dg.validate(dg.parse_diagram(dg.STATE, block))) == []


# ---------------------------------------------------------------------------
# brute-force oracle for the use-case rules


def random_usecase(rng):
    n_actors = rng.randint(1, 3)
    n_cases = rng.randint(1, 3)
    actors = [f"A{i}" for i in range(n_actors)]
    cases = [f"U{i}" for i in range(n_cases)]
    lines = [rng.choice(["graph LR", "graph TD"])]
    lines += [f"{a}(({a}name))" for a in actors]
    lines += [f"{u}([{u}act])" for u in cases]
    everyone = actors + cases
    for _ in range(rng.randint(0, 6)):
        src, dst = rng.choice(everyone), rng.choice(everyone)
        lines.append(f"{src} -->|r| {dst}")
    return "\n".join(lines), actors, cases, lines


def oracle_rules(text, actors, cases, lines):
    """Independent restatement of the published linkage rules."""
    edges = [(l.split()[0], l.split()[-1]) for l in lines if "-->" in l]
    broken = set()
    if lines[0] != "graph LR":
        broken.add("uc-header")
    for a in actors:
        if not any((s == a and d in cases) or (d == a and s in cases)
                   for s, d in edges):
            broken.add("uc-actor-unlinked")
    for u in cases:
        touches_actor = any((s == u and d in actors) or (d == u and s in actors)
                            for s, d in edges)
        points_at_case = any(s == u and d in cases and d != u for s, d in edges)
        if not (touches_actor or points_at_case):
            broken.add("uc-usecase-unlinked")
    if any(s in actors and d in actors for s, d in edges):
        broken.add("uc-actor-actor-edge")
    return broken


def test_validator_agrees_with_brute_force_oracle():
    rng = random.Random(20260824)
    for _ in range(300):
        text, actors, cases, lines = random_usecase(rng)
        got = {x.rule for x in dg.validate(dg.parse_diagram(dg.USECASE, text))
               if x.severity == "error"
               and x.rule in {"uc-header", "uc-actor-unlinked",
                              "uc-usecase-unlinked", "uc-actor-actor-edge"}}
        want = oracle_rules(text, actors, cases, lines)
        assert got == want, f"validator {got} != oracle {want} for:\n{text}"


# ---------------------------------------------------------------------------
# properties


@given(st.lists(st.sampled_from(["A((x))", "B([y])", "A -->|z| B", "C([w])",
                                 "A -->|q| C"]),
                min_size=0, max_size=8))
@settings(max_examples=60)
def test_repair_always_terminates_and_is_stable(lines):
    text = "graph LR\n" + "\n".join(lines)
    d = dg.parse_diagram(dg.USECASE, text)
    once, _ = dg.repair(d)
    twice, report = dg.repair(once)
    assert twice.raw_lines == once.raw_lines
    assert report.applied == []
