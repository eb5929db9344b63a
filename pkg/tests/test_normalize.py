from classicdl.descriptions import CLASSIC_THING, Individual, NOTHING, THING
from classicdl.graph import (
    AEdge,
    DescriptionGraph,
    GraphNode,
    INF,
    REdge,
    isomorphic,
    singleton_graph,
    translate,
)
from classicdl.normalize import canonicalize, merge_a_edges, merge_r_edges
from classicdl.parsing import parse_description, parse_kb


def canon(parse, text, kb=None):
    return canonicalize(translate(parse(text)), kb)


def test_min_above_max_is_incoherent(parse):
    g = canon(parse, "and(at-least(2, r), at-most(1, r))")
    assert g.incoherent
    assert g.root_node.atoms == {NOTHING}
    assert len(g.nodes) == 1


def test_zero_max_marks_restriction_only(parse):
    g = canon(parse, "and(at-most(0, r), all(r, GAME))")
    assert not g.incoherent
    (edge,) = g.root_node.r_edges
    assert edge.max == 0
    assert edge.restriction.incoherent


def test_incoherent_restriction_zeroes_max(parse):
    g = canon(parse, "all(r, nothing)")
    (edge,) = g.root_node.r_edges
    assert edge.max == 0 and edge.restriction.incoherent
    assert not g.incoherent


def test_nothing_under_attribute_sinks_graph(parse):
    # attributes are total, so an empty value set empties the whole concept
    assert canon(parse, "all(f, nothing)").incoherent


def test_host_closure(parse):
    g = canon(parse, "INTEGER")
    assert g.root_node.atoms == {
        "INTEGER", "REAL", "COMPLEX", "NUMBER", "HOST-THING"}


def test_realm_conflict(parse):
    assert canon(parse, "and(GAME, INTEGER)").incoherent
    assert canon(parse, "and(classic-thing, host-thing)").incoherent


def test_incomparable_host_types(parse):
    assert canon(parse, "and(INTEGER, STRING)").incoherent
    assert not canon(parse, "and(INTEGER, NUMBER)").incoherent


def test_chain_family_collapse(parse):
    n = 5
    parts = ["same-as((a%d),(b%d))" % (i, i) for i in range(1, n + 1)]
    parts += ["same-as((a%d),(a%d))" % (i, i + 1) for i in range(1, n)]
    g = canon(parse_description, "and(%s)" % ", ".join(parts))
    assert len(g.nodes) == 2


def test_merge_r_edges_componentwise():
    thing = singleton_graph(THING)
    game = singleton_graph("GAME")
    e1 = REdge("r", 1, INF, thing, set())
    e2 = REdge("r", 0, 3, game, set())
    node = GraphNode(atoms={CLASSIC_THING}, r_edges=[e1, e2])
    merged = merge_r_edges(node, e1, e2)
    (edge,) = merged.r_edges
    assert (edge.min, edge.max) == (1, 3)
    assert edge.restriction.root_node.atoms == {THING, "GAME"}


def test_merge_r_edges_idempotent_bounds():
    e1 = REdge("r", 0, INF, singleton_graph(THING), set())
    e2 = REdge("r", 0, INF, singleton_graph(THING), set())
    node = GraphNode(atoms={CLASSIC_THING}, r_edges=[e1, e2])
    (edge,) = merge_r_edges(node, e1, e2).r_edges
    assert (edge.min, edge.max) == (0, INF)


def test_merge_r_edges_unions_fillers():
    p, q = Individual("P"), Individual("Q")
    e1 = REdge("r", 0, INF, singleton_graph(THING), {p})
    e2 = REdge("r", 0, INF, singleton_graph(THING), {q})
    node = GraphNode(atoms={CLASSIC_THING}, r_edges=[e1, e2])
    (edge,) = merge_r_edges(node, e1, e2).r_edges
    assert edge.fillers == {p, q}


def test_merge_a_edges_basic():
    g = DescriptionGraph()
    g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}))
    x = g.add_node(GraphNode(atoms={"GAME"}))
    y = g.add_node(GraphNode(atoms={"PERSON"}))
    e1 = AEdge(g.root, x, "f")
    e2 = AEdge(g.root, y, "f")
    g.a_edges = [e1, e2]
    out = merge_a_edges(g, e1, e2)
    assert len(out.nodes) == 2
    (edge,) = out.a_edges
    assert out.nodes[edge.dst].atoms == {"GAME", "PERSON"}


def test_merge_a_edges_same_target():
    g = DescriptionGraph()
    g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}))
    x = g.add_node(GraphNode(atoms={THING}))
    e1 = AEdge(g.root, x, "f")
    e2 = AEdge(g.root, x, "f")
    g.a_edges = [e1, e2]
    out = merge_a_edges(g, e1, e2)
    assert len(out.a_edges) == 1 and len(out.nodes) == 2


def test_self_loop_collapse(parse):
    g = canon(parse_description,
              "and(all(friend, TALL), same-as((friend),(friend,friend)))")
    assert len(g.nodes) == 2
    loops = [e for e in g.a_edges if e.src == e.dst]
    assert len(loops) == 1
    hub = g.nodes[loops[0].dst]
    assert "TALL" in hub.atoms and CLASSIC_THING in hub.atoms


def test_cascade_reduces_node_count(parse):
    # two target collapses, each removing exactly one node
    raw = translate(parse("and(same-as((f),(g)), same-as((f),(h)), "
                          "same-as((g),(h)))"))
    out = canonicalize(raw)
    assert len(raw.nodes) == 4
    assert len(out.nodes) == 2


def test_attr_fill_conflict(parse, kb):
    g = canonicalize(
        translate(parse("and(fills(coach, Pat), fills(coach, Kim))")), kb)
    assert g.incoherent


def test_one_of_fillers_pushed_into_edge(parse, kb):
    g = canonicalize(
        translate(parse("and(all(r, one-of(P, Q)), at-least(2, r))")), kb)
    (edge,) = g.root_node.r_edges
    assert edge.fillers == {Individual("P"), Individual("Q")}
    assert edge.min == 2 and edge.max == 2


def test_max_capped_by_dom(parse, kb):
    g = canonicalize(translate(parse("all(r, one-of(P, Q))")), kb)
    (edge,) = g.root_node.r_edges
    assert edge.max == 2


def test_empty_dom_incoherent(parse, kb):
    g = canonicalize(
        translate(parse("and(one-of(P), one-of(Q))")), kb)
    assert g.incoherent


def test_host_value_dom_typing(parse):
    # string value cannot inhabit an INTEGER-atom node
    g = canonicalize(translate(parse('and(one-of(4, "x"), INTEGER)')))
    (node,) = g.nodes.values()
    assert node.dom == frozenset({Individual("4", "INTEGER", 4)})


def test_attr_filler_outside_target_dom(parse, kb):
    g = canonicalize(
        translate(parse("and(fills(coach, Pat), all(coach, one-of(Kim)))")),
        kb)
    assert g.incoherent


def test_single_dom_becomes_attr_filler(parse, kb):
    g = canonicalize(translate(parse("all(coach, one-of(Pat))")), kb)
    (edge,) = g.a_edges
    assert edge.fillers == {Individual("Pat")}


def test_role_filler_outside_dom(parse, kb):
    g = canonicalize(
        translate(parse("and(fills(r, Pat), all(r, one-of(P, Q)))")), kb)
    assert g.incoherent


def test_idempotent(parse, kb):
    for text in [
        "and(GAME, all(participants, PERSON), "
        "same-as((coach),(captain,father)))",
        "and(all(r, one-of(P, Q)), at-least(2, r), fills(coach, Pat))",
        "and(at-most(0, r), all(r, GAME))",
        "nothing",
    ]:
        c1 = canonicalize(translate(parse(text)), kb)
        assert isomorphic(c1, canonicalize(c1, kb))


def test_two_schedules_agree(parse, kb):
    for text in [
        "and(GAME, all(participants, PERSON), "
        "same-as((coach),(captain,father)))",
        "and(all(r, one-of(P, Q)), at-least(2, r), at-most(3, r))",
        "and(same-as((f),(g)), same-as((f),(h)), all(f, TALL))",
    ]:
        g = translate(parse(text))
        assert isomorphic(canonicalize(g, kb),
                          canonicalize(g, kb, schedule="alternate"))


def test_disjointness_hook():
    kb = parse_kb("role r\ndisjoint MALE FEMALE")
    g = canonicalize(translate(parse_description("and(MALE, FEMALE)", kb)),
                     kb)
    assert g.incoherent
    g = canonicalize(
        translate(parse_description("all(r, and(MALE, FEMALE))", kb)), kb)
    (edge,) = g.root_node.r_edges
    assert edge.max == 0 and edge.restriction.incoherent
    # no group hit twice: untouched
    g2 = canonicalize(translate(parse_description("and(MALE, GAME)", kb)), kb)
    assert not g2.incoherent


def test_apply_disjointness_standalone():
    from classicdl.kb import apply_disjointness

    kb = parse_kb("role r\ndisjoint MALE FEMALE")
    g = canonicalize(translate(parse_description("and(MALE, FEMALE)", kb)))
    assert not g.incoherent  # canonicalized without the kb
    assert apply_disjointness(g, kb).incoherent


def test_canonical_unique_edges(parse, kb):
    g = canonicalize(
        translate(parse("and(at-least(1, r), at-most(3, r), all(r, GAME), "
                        "same-as((f),(g)), same-as((f),(g,h)))")), kb)
    for sub in g.subgraphs():
        seen = set()
        for e in sub.a_edges:
            assert (e.src, e.attr) not in seen
            seen.add((e.src, e.attr))
        for node in sub.nodes.values():
            roles = [e.role for e in node.r_edges]
            assert len(roles) == len(set(roles))


def test_typed_filler_against_host_concept_target(parse, kb):
    g = canonicalize(translate(parse("and(fills(coach, 4), "
                                     "all(coach, STRING))")), kb)
    assert g.incoherent
    g = canonicalize(translate(parse("and(fills(coach, 4), "
                                     "all(coach, INTEGER))")), kb)
    assert not g.incoherent


def test_distinct_literals_never_conflate(parse, kb):
    # 4 and 4.0 are different host objects with disjoint extensions
    g = canonicalize(translate(parse("and(one-of(4), one-of(4.0))")), kb)
    assert g.incoherent


def test_dom_typing_keeps_compatible_values(parse, kb):
    g = canonicalize(translate(parse('and(one-of(1, 2.5, "x"), NUMBER)')),
                     kb)
    assert sorted(i.name for i in g.root_node.dom) == ["1", "2.5"]
