"""Structural subsumption between a description and a canonical graph.

``subsumes_graph`` decides whether a description subsumes a canonical
description graph by a disjunction of purely structural conditions — atom
membership, bound comparisons, recursive checks through role and attribute
edges, attribute-path equalities, and filler/dom containment.  No facts
about individuals beyond the graph's own filler and dom fields are
consulted.  ``subsumes`` wires up the full pipeline: expand both
descriptions, translate and canonicalize the subsumee, then test.
"""

from __future__ import annotations

from .descriptions import (
    AllAttr,
    AllRole,
    And,
    AtLeast,
    AtMost,
    CLASSIC_THING,
    ClassicThing,
    ConceptName,
    Description,
    FillsAttr,
    FillsRole,
    HOST_THING,
    HostConcept,
    HostThing,
    NamedRef,
    Nothing,
    NOTHING,
    OneOf,
    Primitive,
    SameAs,
    Test,
    THING,
    Thing,
)
from .graph import DescriptionGraph, GraphNode, translate
from .kb import KnowledgeBase, expand
from .normalize import canonicalize

_THING_GRAPH: DescriptionGraph | None = None


def thing_graph() -> DescriptionGraph:
    """The canonical graph of THING (memoized)."""
    global _THING_GRAPH
    if _THING_GRAPH is None:
        _THING_GRAPH = canonicalize(translate(Thing()))
    return _THING_GRAPH


def _is_thing_graph(g: DescriptionGraph) -> bool:
    if g.incoherent or len(g.nodes) != 1 or g.a_edges:
        return False
    node = g.root_node
    return node.atoms == {THING} and not node.r_edges and node.dom is None


def _attr_table(g: DescriptionGraph):
    """(source, attribute) -> a-edge lookup table, cached on the graph.

    Canonical graphs are immutable values, and re-rooted views share the
    same edge list, so the cache is keyed on that list's identity.
    """
    cached = getattr(g, "_attr_table", None)
    if cached is not None and cached[0] is g.a_edges:
        return cached[1]
    table = {}
    for e in g.a_edges:
        table.setdefault((e.src, e.attr), e)
    g._attr_table = (g.a_edges, table)
    return table


def _role_table(node: GraphNode):
    """role -> r-edge lookup table, cached on the node."""
    cached = getattr(node, "_role_table", None)
    if cached is not None and cached[0] is node.r_edges:
        return cached[1]
    table = {}
    for e in node.r_edges:
        table.setdefault(e.role, e)
    node._role_table = (node.r_edges, table)
    return table


def _attr_step(g: DescriptionGraph, nid: int, attr: str) -> int | None:
    """Follow the unique a-edge labelled ``attr`` out of a node, if any."""
    e = _attr_table(g).get((nid, attr))
    return None if e is None else e.dst


def _follow_path(g: DescriptionGraph, start: int, chain) -> int | None:
    cur = start
    for attr in chain:
        nxt = _attr_step(g, cur, attr)
        if nxt is None:
            return None
        cur = nxt
    return cur


def subsumes_graph(d: Description, g: DescriptionGraph) -> bool:
    """True iff the description subsumes the canonical graph."""
    if isinstance(d, (NamedRef, Primitive, Test)):
        raise ValueError("description must be expanded before subsumption")
    # An incoherent subsumee is below everything.
    if g.incoherent:
        return True
    # A subsumer equivalent to THING is above everything; equivalence is a
    # syntactic check plus a recursive test against the THING graph (short-
    # circuited when the subsumee already is that graph).
    if isinstance(d, Thing):
        return True
    if not _is_thing_graph(g) and subsumes_graph(d, thing_graph()):
        return True
    # Conjunctions decompose.
    if isinstance(d, And):
        return all(subsumes_graph(c, g) for c in d.items)

    root = g.root_node
    if isinstance(d, ConceptName):
        return d.name in root.atoms
    if isinstance(d, HostConcept):
        return d.name in root.atoms
    if isinstance(d, ClassicThing):
        return CLASSIC_THING in root.atoms
    if isinstance(d, HostThing):
        return HOST_THING in root.atoms
    if isinstance(d, Nothing):
        return NOTHING in root.atoms
    if isinstance(d, AtLeast):
        e = _role_table(root).get(d.role)
        return e is not None and e.min >= d.n
    if isinstance(d, AtMost):
        e = _role_table(root).get(d.role)
        return e is not None and e.max <= d.n
    if isinstance(d, AllRole):
        e = _role_table(root).get(d.role)
        if e is not None and subsumes_graph(d.restriction, e.restriction):
            return True
        # A universal role restriction whose body covers everything only
        # needs the subsumee to be classic, so the role is applicable.
        return (subsumes_graph(d.restriction, thing_graph())
                and CLASSIC_THING in root.atoms)
    if isinstance(d, AllAttr):
        nxt = _attr_step(g, g.root, d.attr)
        if nxt is not None and subsumes_graph(d.restriction, g.rerooted(nxt)):
            return True
        return (subsumes_graph(d.restriction, thing_graph())
                and CLASSIC_THING in root.atoms)
    if isinstance(d, SameAs):
        end_l = _follow_path(g, g.root, d.left)
        end_r = _follow_path(g, g.root, d.right)
        if end_l is not None and end_l == end_r:
            return True
        # Equal chains extended by one shared attribute stay equal as long
        # as the shared prefix ends at a classic node.
        if d.left[-1] == d.right[-1]:
            pre_l = _follow_path(g, g.root, d.left[:-1])
            pre_r = _follow_path(g, g.root, d.right[:-1])
            if (pre_l is not None and pre_l == pre_r
                    and CLASSIC_THING in g.nodes[pre_l].atoms):
                return True
        return False
    if isinstance(d, FillsRole):
        e = _role_table(root).get(d.role)
        return e is not None and d.who in e.fillers
    if isinstance(d, FillsAttr):
        e = _attr_table(g).get((g.root, d.attr))
        return e is not None and d.who in e.fillers
    if isinstance(d, OneOf):
        return root.dom is not None and root.dom <= set(d.members)
    raise TypeError("not a description: %r" % (d,))


def subsumes(d: Description, c: Description,
             kb: KnowledgeBase | None = None) -> bool:
    """Does ``d`` subsume ``c``?  Expands both descriptions, canonicalizes
    the subsumee's graph, and runs the structural test."""
    if kb is None:
        kb = KnowledgeBase.empty()
    de = expand(d, kb)
    ce = expand(c, kb)
    return subsumes_graph(de, canonicalize(translate(ce), kb))


def equivalent(d: Description, c: Description,
               kb: KnowledgeBase | None = None) -> bool:
    """Mutual subsumption."""
    return subsumes(d, c, kb) and subsumes(c, d, kb)
