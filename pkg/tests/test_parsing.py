import pytest

from classicdl.descriptions import (
    AllAttr,
    AllRole,
    And,
    AtLeast,
    AtMost,
    ConceptName,
    FillsAttr,
    HostConcept,
    Individual,
    NamedRef,
    OneOf,
    SameAs,
    Thing,
    to_text,
)
from classicdl.kb import KbError, expand
from classicdl.parsing import ParseError, parse_description, parse_kb


def test_simple_conjunction(parse):
    d = parse("and(GAME, at-least(4, participants))")
    assert d == And((ConceptName("GAME"), AtLeast(4, "participants")))


def test_figure_source_description(parse):
    d = parse("and(GAME, all(participants, PERSON), "
              "same-as((coach),(captain,father)))")
    assert d == And((
        ConceptName("GAME"),
        AllRole("participants", ConceptName("PERSON")),
        SameAs(("coach",), ("captain", "father")),
    ))


def test_role_in_same_as_rejected(parse):
    with pytest.raises(ParseError, match="attributes only"):
        parse("same-as((friend),(participants))")


def test_attribute_in_number_restriction_rejected(parse):
    with pytest.raises(ParseError, match="role"):
        parse("at-least(2, coach)")


def test_heterogeneous_one_of_rejected(parse):
    with pytest.raises(ParseError, match="all host values or all classic"):
        parse("one-of(Pat, 4)")


def test_host_literals(parse):
    d = parse('one-of(4, 4.5, "abc")')
    assert isinstance(d, OneOf)
    kinds = [(m.host_type, m.value) for m in d.members]
    assert kinds == [("INTEGER", 4), ("REAL", 4.5), ("STRING", "abc")]


def test_string_escapes_round_trip():
    d = parse_description('fills(f, "a\\"b\\\\c")',
                          inferred_attrs={"f"})
    assert isinstance(d, FillsAttr)
    assert d.who.value == 'a"b\\c'
    assert parse_description(to_text(d), inferred_attrs={"f"}) == d


def test_at_least_zero_rejected(parse):
    with pytest.raises(ParseError, match="positive"):
        parse("at-least(0, r)")


def test_at_most_zero_allowed(parse):
    assert parse("at-most(0, r)") == AtMost(0, "r")


def test_reserved_atom_spelling_rejected(parse):
    with pytest.raises(ParseError, match="reserved"):
        parse("and(THING, GAME)")


def test_unknown_role_with_kb_rejected(parse):
    with pytest.raises(ParseError, match="unknown role or attribute"):
        parse("all(undeclared, GAME)")


def test_positioned_error():
    try:
        parse_description("and(GAME, ,)")
    except ParseError as exc:
        assert exc.pos == 10
    else:
        pytest.fail("no error raised")


def test_inference_without_kb():
    # same-as names become attributes; other pnames default to roles
    d = parse_description("and(all(participants, PERSON), "
                          "same-as((coach),(captain)), all(coach, TALL))")
    conjuncts = d.items
    assert isinstance(conjuncts[0], AllRole)
    assert isinstance(conjuncts[2], AllAttr)


def test_host_concept_names(parse):
    assert parse("INTEGER") == HostConcept("INTEGER")
    assert parse_description("REAL") == HostConcept("REAL")


def test_kb_declarations_and_expansion():
    kb = parse_kb("role participants\nattribute coach\n"
                  "concept E := at-least(1, participants)\nconcept F := E")
    assert kb.kind_of("participants") == "role"
    assert kb.kind_of("coach") == "attribute"
    assert expand(NamedRef("F"), kb) == AtLeast(1, "participants")


def test_kb_forward_reference():
    kb = parse_kb("role r\nconcept F := E\nconcept E := at-least(1, r)")
    assert expand(NamedRef("F"), kb) == AtLeast(1, "r")


def test_kb_recursion_rejected():
    with pytest.raises(KbError, match="recursive"):
        parse_kb("concept A := B\nconcept B := A")


def test_kb_redeclaration_rejected():
    with pytest.raises(ParseError, match="already declared"):
        parse_kb("role r\nattribute r")


def test_kb_host_types():
    kb = parse_kb("host-type TEMPERATURE subtype-of REAL")
    assert kb.lattice.leq("TEMPERATURE", "NUMBER")
    with pytest.raises(ParseError, match="unknown parent"):
        parse_kb("host-type A subtype-of B\nhost-type B")


def test_kb_comments_and_blank_lines():
    kb = parse_kb("# a comment\n\nrole r  # trailing comment\n")
    assert kb.kind_of("r") == "role"


def test_disjoint_declaration():
    kb = parse_kb("disjoint MALE FEMALE")
    assert frozenset({"MALE", "FEMALE"}) in kb.disjoint_groups


def test_round_trip_with_kb(kb):
    texts = [
        "and(GAME, at-least(4, participants))",
        "all(coach, and(PERSON, fills(f, Pat)))",
        "same-as((coach),(captain,father))",
        'one-of(4, 17)',
        "at-most(0, r)",
        "primitive(and(PERSON, at-least(1, r)), employee)",
        "test(prime, host)",
        "nothing",
    ]
    for text in texts:
        d = parse_description(text, kb)
        assert parse_description(to_text(d), kb) == d


def test_parser_totality_on_junk(kb):
    for junk in ["", "and(", ")", "and(GAME)", "one-of()", "all(r)",
                 "fills(r, )", "same-as((f),())", "at-least(x, r)",
                 "\x00", "and(GAME, PERSON) trailing"]:
        with pytest.raises(ParseError):
            parse_description(junk, kb)


def test_individual_identity():
    four = parse_description("one-of(4)").members[0]
    four_real = parse_description("one-of(4.0)").members[0]
    assert four != four_real  # distinct host values, distinct extensions
    assert four == Individual("4", "INTEGER", 4)


def test_thing_keyword(parse):
    assert parse("thing") == Thing()
