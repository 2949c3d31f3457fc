"""Script parsing: directive recognition, totality, binding, static checks."""

import re

import pytest
from hypothesis import given, strategies as st

from eabss import script as sc
from eabss.errors import EmptyScript, MissingSlot, UnterminatedBrace


def no_space(text):
    return re.sub(r"\s+", "", text)


# ---------------------------------------------------------------------------
# split_commands


def test_split_commands_plain():
    assert sc.split_commands("a| b| c") == ["a", " b", " c"]


def test_split_commands_keeps_pipes_inside_parens():
    text = "Use the format (Example for relationship: A -->|activity| A1)| next"
    parts = sc.split_commands(text)
    assert len(parts) == 2
    assert "A -->|activity| A1" in parts[0]


def test_split_commands_keeps_pipes_inside_quotes():
    parts = sc.split_commands('Say "a|b" now| done')
    assert parts == ['Say "a|b" now', " done"]


def test_split_commands_apostrophe_is_not_a_quote():
    parts = sc.split_commands("the actor's name| b")
    assert len(parts) == 2


# ---------------------------------------------------------------------------
# directive recognition


def test_role_change():
    cmd = sc.parse_command(
        'Take on the "role" of a "Sociologist" with experience in '
        '"Agent-Based Social Simulation"')
    roles = [d for d in cmd.directives if isinstance(d, sc.RoleChange)]
    assert roles[0].role == "Sociologist"
    assert roles[0].experience == "Agent-Based Social Simulation"


def test_tone_change():
    cmd = sc.parse_command('Use a "debating tone"')
    tones = [d for d in cmd.directives if isinstance(d, sc.ToneChange)]
    assert tones[0].tone == "debating tone"


def test_memorise_and_list():
    cmd = sc.parse_command(
        'Memorise "Exploratory" as {key-researchDesign}. '
        "List memorised key-researchDesign")
    mems = [d for d in cmd.directives if isinstance(d, sc.Memorise)]
    lists = [d for d in cmd.directives if isinstance(d, sc.ListKey)]
    assert mems[0].key.name == "key-researchDesign"
    assert lists[0].key.name == "key-researchDesign"


def test_heading_with_level():
    cmd = sc.parse_command(
        "Display MD \"Problem Statement\". Render as 'Heading Level 3'. "
        "Only show rendered result")
    h = [d for d in cmd.directives if isinstance(d, sc.DisplayHeading)][0]
    assert h.text == "Problem Statement"
    assert h.level == 3


def test_word_limit_softness():
    soft = sc.parse_command("Define the aim in 40 WORDS (if possible)")
    hard = sc.parse_command("concise justifications in ABOUT 25 WORDS")
    s = [d for d in soft.directives if isinstance(d, sc.WordLimit)][0]
    h = [d for d in hard.directives if isinstance(d, sc.WordLimit)][0]
    assert (s.n, s.soft) == (40, True)
    assert (h.n, h.soft) == (25, False)


def test_silent_terminator():
    cmd = sc.parse_command('Got it? Say "yes" or say "no".')
    assert isinstance(cmd.directives[-1], sc.SilentModeTerminator)


def test_diagram_request_kinds():
    for phrase, kind in [("use case", "usecase"), ("class", "class"),
                         ("state machine", "state"), ("sequence", "sequence")]:
        cmd = sc.parse_command(
            f"Generate a script for a 'comprehensive {phrase} diagram' in \"Mermaid.js\".")
        ds = [d for d in cmd.directives if isinstance(d, sc.DiagramRequest)]
        assert ds and ds[0].kind == kind


def test_requirements_list_items():
    cmd = sc.parse_command(
        "You ALWAYS must satisfy the following 2 requirements for defining x: "
        "1) First rule. 2) Second rule. Memorise this as {key-x}")
    reqs = [d for d in cmd.directives if isinstance(d, sc.RequirementsList)][0]
    assert reqs.items == ("First rule.", "Second rule.")


def test_unmatched_prose_is_free_text():
    cmd = sc.parse_command("Provide the question and details of the discussion")
    assert len(cmd.directives) == 1
    assert isinstance(cmd.directives[0], sc.FreeText)


def test_totality_no_byte_lost(museum_doc):
    """Every non-space byte of every command survives into some directive."""
    for chain in museum_doc.chains:
        for cmd in chain.commands:
            joined = "".join(d.raw for d in cmd.directives)
            assert no_space(joined) == no_space(cmd.raw)


# ---------------------------------------------------------------------------
# chains


def test_chain_annotations():
    opt = sc.parse_chain("[optional] Play a game")
    itv = sc.parse_chain("[intervene] Increase complexity")
    assert opt.optional and not opt.intervene
    assert itv.intervene and not itv.optional


def test_chain_round_trip_is_raw_text():
    raw = "[optional] Play a game| Use a \"scientific tone\"."
    assert sc.render_chain(sc.parse_chain(raw)) == raw


def test_unterminated_brace():
    with pytest.raises(UnterminatedBrace):
        sc.parse_chain("Memorise this as {key-x")


def test_ends_silent():
    chain = sc.parse_chain('Do the thing. Got it? Say "yes" or say "no".')
    assert chain.ends_silent
    assert not sc.parse_chain("Do the thing.").ends_silent


# ---------------------------------------------------------------------------
# documents


def test_parse_script_segments(museum_doc):
    assert [s.name for s in museum_doc.segments] == [
        "PREPARATION", "ANALYSIS", "DESIGN", "CONCLUSION"]


def test_parse_script_subsections(museum_doc):
    analysis = museum_doc.segments[1]
    names = [s.heading for s in analysis.subsections if s.heading]
    assert names == ["Problem Statement", "Study Outline", "Model Scope",
                     "Key Activities"]


def test_parse_script_chain_count(museum_doc):
    assert len(museum_doc.chains) == 38


def test_chain_raws_reproduce_source(museum_source, museum_doc):
    bullets = [line[2:] for line in museum_source.splitlines()
               if line.startswith("- ")]
    parsed = [c.raw_text for c in museum_doc.chains]
    assert parsed == bullets  # byte-identical chain round-trips


def test_empty_script():
    with pytest.raises(EmptyScript):
        sc.parse_script("   \n\n")


# ---------------------------------------------------------------------------
# case binding


def test_case_slots_detected(museum_doc):
    assert set(museum_doc.case_slots) == {
        "topic", "research_design", "domain", "specialisation"}


def test_bind_case_touches_only_slots(museum_doc):
    binding = sc.CaseBinding("A hospital ward study", "Descriptive",
                             "Health Care", "Patient Flow")
    bound = sc.bind_case(museum_doc, binding)
    assert "A hospital ward study" in bound.source_text
    assert 'Memorise "Descriptive" as {key-researchDesign}' in bound.source_text
    # textual diff oracle: outside the four slot spans, the text is unchanged
    before = museum_doc.source_text
    after = bound.source_text
    for pattern in sc._SLOT_PATTERNS.values():
        before = pattern.sub(lambda m: m.group(1) + "@" + m.group(3), before, count=1)
        after = pattern.sub(lambda m: m.group(1) + "@" + m.group(3), after, count=1)
    assert before == after


def test_bind_case_missing_slot():
    doc = sc.parse_script("SCRIPT\n\n- Do something simple.")
    with pytest.raises(MissingSlot):
        sc.bind_case(doc, sc.CaseBinding("t", "r", "d", "s"))


def test_bind_case_empty_topic_rejected():
    with pytest.raises(ValueError):
        sc.CaseBinding("  ", "r", "d", "s")


# ---------------------------------------------------------------------------
# static checks


def test_museum_script_has_no_read_before_memorise(museum_doc):
    diags = sc.static_check(museum_doc)
    assert sc.errors_of(diags, "KeyReadBeforeMemorise") == []


def test_read_before_memorise_detected():
    doc = sc.parse_script(
        "SCRIPT\n\n- Consider the memorised key-ghost in your answer.")
    diags = sc.static_check(doc)
    assert sc.errors_of(diags, "KeyReadBeforeMemorise")


def test_example_spans_do_not_count_as_reads():
    doc = sc.parse_script(
        'SCRIPT\n\n- DO NOT print keys (Example: Use "Example" AND NOT '
        '"{key-example}") in replies.')
    assert sc.errors_of(sc.static_check(doc), "KeyReadBeforeMemorise") == []


def test_duplicate_memorise_without_update():
    doc = sc.parse_script(
        "SCRIPT\n\n- Memorise \"a\" as {key-x}.\n- Memorise \"b\" as {key-x}.")
    diags = sc.static_check(doc)
    assert sc.errors_of(diags, "DuplicateMemoriseWithoutUpdate")


def test_optional_key_dependency_is_warning(museum_doc):
    diags = sc.static_check(museum_doc)
    warns = [d for d in diags if d.rule == "OptionalKeyDependency"]
    assert warns and all(w.severity == "warning" for w in warns)


def test_external_keys_suppress_read_error():
    doc = sc.parse_script(
        "SCRIPT\n\n- Consider the memorised key-given in your answer.",
        external_keys=frozenset({"key-given"}))
    assert sc.errors_of(sc.static_check(doc), "KeyReadBeforeMemorise") == []


# ---------------------------------------------------------------------------
# properties

_key_names = st.from_regex(r"key-[a-z][a-zA-Z0-9]{0,10}", fullmatch=True)


@given(_key_names)
def test_normalize_key_idempotent(name):
    decorated = "**{" + name + "}**"
    assert sc.normalize_key(decorated) == name
    assert sc.normalize_key(sc.normalize_key(decorated)) == name


_plain = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"),
                           whitelist_characters=" .,"),
    min_size=1, max_size=60).filter(lambda s: s.strip())


@given(st.lists(_plain, min_size=1, max_size=5))
def test_split_commands_round_trip(parts):
    text = "|".join(parts)
    assert sc.split_commands(text) == parts


@given(_plain)
def test_parse_chain_round_trip(text):
    chain = sc.parse_chain(text)
    assert sc.render_chain(chain) == text
    joined = "".join(d.raw for d in chain.directives)
    assert no_space(joined) == no_space(text)
