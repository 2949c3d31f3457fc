"""Prompt pattern expansion, golden bullets, refinement formulas."""

import re
from importlib import resources

import pytest

from eabss import patterns as pt
from eabss.errors import EmptyTarget, InvalidCount, UnboundSlot
from eabss.script import Memorise, SilentModeTerminator


def norm(text):
    return " ".join(text.split())


@pytest.fixture(scope="module")
def instances():
    return pt.load_instances(resources.files("eabss.data") / "museum_patterns.toml")


@pytest.fixture(scope="module")
def bullets(museum_source=None):
    src = resources.files("eabss.data").joinpath(
        "adaptive_architecture.txt").read_text(encoding="utf-8")
    out = []
    for line in src.splitlines():
        if line.startswith("- "):
            body = line[2:]
            out.append(body[len("[optional] "):]
                       if body.startswith("[optional] ") else body)
    return out


# ---------------------------------------------------------------------------
# golden reproductions of script bullets


def test_golden_aims_co_creation(instances, bullets):
    want = next(b for b in bullets if "potential aims for the study" in b)
    got = pt.expand(instances["potential_aims"]).raw_text
    assert norm(got) == norm(want)


def test_golden_uml_actor_co_creation(instances, bullets):
    want = next(b for b in bullets if "potential ABSS UML actors for the study" in b)
    got = pt.expand(instances["potential_uml_actors"]).raw_text
    assert norm(got) == norm(want)


def test_golden_scope_table(instances, bullets):
    want = next(b for b in bullets if '15 "real-world elements"' in b)
    got = pt.expand(instances["model_scope"]).raw_text
    assert norm(got) == norm(want)


def test_golden_use_case_diagram(instances, bullets):
    want = next(b for b in bullets if "'comprehensive use case diagram'" in b)
    got = pt.expand(instances["use_case_diagram"]).raw_text
    assert norm(got) == norm(want)


# ---------------------------------------------------------------------------
# expansion mechanics


def _general_instance(**extra):
    slots = {
        "role": "Sociologist", "experience": "Agent-Based Social Simulation",
        "terms": "archetype", "elements": '2 "objectives"',
        "specifications": "performance measures", "key_name": "key-objectives",
        "element_change": "1 objective",
    }
    slots.update(extra)
    return pt.PatternInstance(pt.GENERAL, slots)


def test_optional_commands_excluded_by_default():
    chain = pt.expand(_general_instance())
    assert "requirements must be satisfied" not in chain.raw_text
    assert "output format" not in chain.raw_text


def test_optional_commands_included_on_request():
    inst = pt.PatternInstance(
        pt.GENERAL, _general_instance().slots | {
            "requirements": ["Be measurable.", "Be relevant."],
            "output_format": "a numbered list"},
        include_optional=frozenset({4, 6}))
    text = pt.expand(inst).raw_text
    assert "1) Be measurable. 2) Be relevant." in text
    assert "a numbered list" in text


def test_intervene_commands_are_separate_chains():
    chains = pt.expand_with_interventions(pt.PatternInstance(
        pt.GENERAL, _general_instance().slots,
        include_intervene=frozenset({8, 9})))
    assert len(chains) == 3
    assert not chains[0].intervene
    assert all(c.intervene for c in chains[1:])


def test_key_ref_rendered_in_braces():
    chain = pt.expand(_general_instance())
    mems = [d for d in chain.directives if isinstance(d, Memorise)]
    assert mems and mems[0].key.name == "key-objectives"
    assert "{key-objectives}" in chain.raw_text


def test_unbound_slot():
    with pytest.raises(UnboundSlot):
        pt.expand(pt.PatternInstance(pt.GENERAL, {"role": "X"}))


def test_invalid_count():
    with pytest.raises(InvalidCount):
        pt.plan(pt.PatternInstance(pt.CO_CREATION, {
            "topic": "aims", "agree_count": 0, "key_name": "key-a"}))


def test_planned_commands_carry_published_indices(instances):
    planned = pt.plan(instances["model_scope"])
    assert [p.indices for p in planned] == [(1,), (2, 3, 5, 6), (5, 6)]


# ---------------------------------------------------------------------------
# refinement prompts


def test_refinement_formulas():
    cases = {
        pt.REMOVE: "Remove the Educator actor. Update the memorised key-modelScope.",
        pt.ADD: "Add a Guide actor. Update the memorised key-modelScope.",
        pt.INCREASE_COMPLEXITY: "Increase complexity. Update the memorised key-modelScope.",
        pt.REFLECT: ("Critically reflect and improve the table based on your "
                     "reflection. Update the memorised key-modelScope."),
    }
    targets = {pt.REMOVE: "the Educator actor", pt.ADD: "a Guide actor",
               pt.INCREASE_COMPLEXITY: "", pt.REFLECT: "the table"}
    for kind, want in cases.items():
        cmd = pt.refinement(kind, targets[kind], "key-modelScope")
        assert cmd.raw == want


def test_refinement_empty_target():
    with pytest.raises(EmptyTarget):
        pt.refinement(pt.REMOVE, "   ", "key-x")
    # increase-complexity needs no target
    pt.refinement(pt.INCREASE_COMPLEXITY, "", "key-x")


def test_refinement_unknown_kind():
    with pytest.raises(ValueError):
        pt.refinement("polish", "x", "key-x")


# ---------------------------------------------------------------------------
# preparation defaults


def test_preparation_chain_carries_defaults():
    chain = pt.preparation_chain()
    text = chain.raw_text
    assert "Temperature TEMP 1.8" in text
    assert "Top_p NUCLEAR" not in text
    assert "Top_p NUCLEUS SAMPLING 0.9" in text
    assert '"Sociologist"' in text
    assert isinstance(chain.directives[-1], SilentModeTerminator)


def test_generation_defaults_validated():
    with pytest.raises(ValueError):
        pt.GenerationDefaults(temperature=2.5)
    with pytest.raises(ValueError):
        pt.GenerationDefaults(top_p=0.0)


def test_preparation_chain_formats_whole_floats():
    chain = pt.preparation_chain(pt.GenerationDefaults(temperature=1.0, top_p=1.0))
    assert "TEMP 1.0" in chain.raw_text
    assert re.search(r"SAMPLING 1\.0\b", chain.raw_text)
