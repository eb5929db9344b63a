"""Description graphs: the rooted multigraph normal form for descriptions.

A graph holds a set of nodes, a bag of attribute-labelled edges (a-edges),
and a distinguished root.  Nodes carry concept atoms, a bag of
role-labelled components (r-edges, each nesting its own restriction
graph), and a ``dom`` — either the universal marker (``None``) or a finite
set of admissible individuals.  Edges carry filler sets.  Restriction
graphs share no nodes with their parent, so role edges are always
cut-edges.

Node identifiers come from a process-wide counter, which makes the
disjoint unions taken during merging trivially collision-free; structural
equality is therefore always up to renaming (see ``isomorphic``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

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
    Individual,
    NamedRef,
    NOTHING,
    Nothing,
    OneOf,
    Primitive,
    SameAs,
    Test,
    THING,
    Thing,
)

INF = math.inf

_node_ids = itertools.count()


def _fresh_id() -> int:
    return next(_node_ids)


@dataclass
class REdge:
    """Role component of a node: bounds, nested restriction graph, fillers."""

    role: str
    min: int
    max: float  # non-negative integer or INF
    restriction: "DescriptionGraph"
    fillers: set[Individual] = field(default_factory=set)

    def clone(self) -> "REdge":
        return REdge(self.role, self.min, self.max,
                     self.restriction.clone(), set(self.fillers))


@dataclass
class AEdge:
    src: int
    dst: int
    attr: str
    fillers: set[Individual] = field(default_factory=set)

    def clone(self) -> "AEdge":
        return AEdge(self.src, self.dst, self.attr, set(self.fillers))


@dataclass
class GraphNode:
    """Atoms, r-edge bag, and dom (``None`` marks the universal set)."""

    atoms: set[str]
    r_edges: list[REdge] = field(default_factory=list)
    dom: frozenset[Individual] | None = None

    def clone(self) -> "GraphNode":
        return GraphNode(set(self.atoms),
                         [e.clone() for e in self.r_edges],
                         self.dom)


class DescriptionGraph:
    """Rooted description graph; treated as an immutable value once built."""

    def __init__(self):
        self.nodes: dict[int, GraphNode] = {}
        self.a_edges: list[AEdge] = []
        self.root: int = -1
        self.incoherent: bool = False

    def add_node(self, node: GraphNode) -> int:
        nid = _fresh_id()
        self.nodes[nid] = node
        return nid

    def node(self, nid: int) -> GraphNode:
        return self.nodes[nid]

    @property
    def root_node(self) -> GraphNode:
        return self.nodes[self.root]

    def clone(self) -> "DescriptionGraph":
        g = DescriptionGraph()
        g.nodes = {nid: n.clone() for nid, n in self.nodes.items()}
        g.a_edges = [e.clone() for e in self.a_edges]
        g.root = self.root
        g.incoherent = self.incoherent
        return g

    def rerooted(self, nid: int) -> "DescriptionGraph":
        """A view of the same island with a different distinguished node.

        Shares node and edge storage; callers must treat it as read-only.
        """
        g = DescriptionGraph()
        g.nodes = self.nodes
        g.a_edges = self.a_edges
        g.root = nid
        g.incoherent = self.incoherent
        return g

    def subgraphs(self):
        """Yield this graph and every nested restriction graph, preorder."""
        yield self
        for node in self.nodes.values():
            for e in node.r_edges:
                yield from e.restriction.subgraphs()

    def __repr__(self):
        return "<DescriptionGraph root=%d nodes=%d aedges=%d%s>" % (
            self.root, len(self.nodes), len(self.a_edges),
            " incoherent" if self.incoherent else "")


def incoherent_node() -> GraphNode:
    return GraphNode(atoms={NOTHING}, r_edges=[], dom=None)


def incoherent_graph() -> DescriptionGraph:
    g = DescriptionGraph()
    g.root = g.add_node(incoherent_node())
    g.incoherent = True
    return g


def singleton_graph(*atoms: str) -> DescriptionGraph:
    g = DescriptionGraph()
    g.root = g.add_node(GraphNode(atoms=set(atoms)))
    return g


def intersect_doms(d1: frozenset[Individual] | None,
                   d2: frozenset[Individual] | None
                   ) -> frozenset[Individual] | None:
    if d1 is None:
        return d2
    if d2 is None:
        return d1
    return d1 & d2


def merge_nodes(n1: GraphNode, n2: GraphNode) -> GraphNode:
    """Merge two nodes: atoms union, r-edge bag union (duplicates kept),
    dom intersection with the universal marker as identity."""
    return GraphNode(
        atoms=n1.atoms | n2.atoms,
        r_edges=[e.clone() for e in n1.r_edges] + [e.clone() for e in n2.r_edges],
        dom=intersect_doms(n1.dom, n2.dom),
    )


def merge_graphs(g1: DescriptionGraph, g2: DescriptionGraph) -> DescriptionGraph:
    """Merge two graphs: disjoint union of the non-distinguished nodes plus
    a fresh root merging the two old roots; edges on the old roots are
    re-targeted to the new root.

    A merge with an incoherent graph is incoherent (the intersection of an
    empty extension with anything is empty).
    """
    if g1.incoherent or g2.incoherent:
        return incoherent_graph()
    out = DescriptionGraph()
    new_root = out.add_node(merge_nodes(g1.root_node, g2.root_node))
    out.root = new_root

    def absorb(g: DescriptionGraph) -> None:
        for nid, node in g.nodes.items():
            if nid != g.root:
                out.nodes[nid] = node.clone()
        for e in g.a_edges:
            src = new_root if e.src == g.root else e.src
            dst = new_root if e.dst == g.root else e.dst
            out.a_edges.append(AEdge(src, dst, e.attr, set(e.fillers)))

    absorb(g1)
    absorb(g2)
    return out


def translate(d: Description) -> DescriptionGraph:
    """Turn an expanded description into a description graph.

    Every well-formed expanded description translates; the result's
    extension equals the description's in every possible world.  Doms
    default to the universal marker and filler sets to empty.
    """
    if isinstance(d, (NamedRef, Primitive, Test)):
        raise ValueError("description must be expanded before translation")
    if isinstance(d, Thing):
        return singleton_graph(THING)
    if isinstance(d, ClassicThing):
        return singleton_graph(CLASSIC_THING)
    if isinstance(d, HostThing):
        return singleton_graph(HOST_THING)
    if isinstance(d, Nothing):
        return incoherent_graph()
    if isinstance(d, (ConceptName, HostConcept)):
        return singleton_graph(d.name)
    if isinstance(d, And):
        g = translate(d.items[0])
        for item in d.items[1:]:
            g = merge_graphs(g, translate(item))
        return g
    if isinstance(d, AtLeast):
        return _redge_graph(d.role, d.n, INF, singleton_graph(THING))
    if isinstance(d, AtMost):
        return _redge_graph(d.role, 0, d.n, singleton_graph(THING))
    if isinstance(d, AllRole):
        return _redge_graph(d.role, 0, INF, translate(d.restriction))
    if isinstance(d, FillsRole):
        # The filler set carries the individual; the restriction stays THING
        # because a filler constraint says nothing about the *other*
        # fillers (an r-edge restriction binds them all).
        return _redge_graph(d.role, 0, INF, singleton_graph(THING),
                            fillers={d.who})
    if isinstance(d, AllAttr):
        # If the inner graph is incoherent its node keeps the NOTHING atom;
        # normalization propagates the incoherence back up.
        inner = translate(d.restriction)
        g = DescriptionGraph()
        g.nodes = dict(inner.nodes)
        g.a_edges = list(inner.a_edges)
        g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}))
        g.a_edges.append(AEdge(g.root, inner.root, d.attr))
        return g
    if isinstance(d, FillsAttr):
        g = DescriptionGraph()
        g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}))
        end_atoms = HOST_THING if d.who.is_host else CLASSIC_THING
        end = g.add_node(GraphNode(atoms={end_atoms}))
        g.a_edges.append(AEdge(g.root, end, d.attr, fillers={d.who}))
        return g
    if isinstance(d, OneOf):
        g = DescriptionGraph()
        atoms = HOST_THING if d.is_host else CLASSIC_THING
        g.root = g.add_node(GraphNode(atoms={atoms},
                                      dom=frozenset(d.members)))
        return g
    if isinstance(d, SameAs):
        return _same_as_graph(d.left, d.right)
    raise TypeError("not a description: %r" % (d,))


def _redge_graph(role: str, lo: int, hi: float,
                 restriction: DescriptionGraph,
                 fillers: set[Individual] | None = None) -> DescriptionGraph:
    g = DescriptionGraph()
    edge = REdge(role, lo, hi, restriction, set(fillers or ()))
    g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}, r_edges=[edge]))
    return g


def _same_as_graph(left: tuple[str, ...], right: tuple[str, ...]) -> DescriptionGraph:
    """Two disjoint attribute paths from the root to a shared end node."""
    g = DescriptionGraph()
    g.root = g.add_node(GraphNode(atoms={CLASSIC_THING}))
    end = g.add_node(GraphNode(atoms={THING}))

    def lay_path(chain: tuple[str, ...]) -> None:
        prev = g.root
        for attr in chain[:-1]:
            mid = g.add_node(GraphNode(atoms={CLASSIC_THING}))
            g.a_edges.append(AEdge(prev, mid, attr))
            prev = mid
        g.a_edges.append(AEdge(prev, end, chain[-1]))

    lay_path(left)
    lay_path(right)
    return g


def graph_size(g: DescriptionGraph) -> int:
    """Total size: nodes, atoms, dom entries, edges, bounds, and nested
    restriction graphs."""
    total = 0
    for node in g.nodes.values():
        total += 1 + len(node.atoms) + (0 if node.dom is None else len(node.dom))
        for e in node.r_edges:
            total += 3 + len(e.fillers) + graph_size(e.restriction)
    total += sum(1 + len(e.fillers) for e in g.a_edges)
    return total


# ---------------------------------------------------------------------------
# Deterministic ordering, dumps, and isomorphism


def _traversal_ranks(g: DescriptionGraph) -> dict[int, int]:
    """Rank nodes by a deterministic traversal from the root.

    Out-edges are followed in (attribute, stored order) so canonical graphs
    — which have at most one edge per (node, attribute) — get an ordering
    that is independent of internal node ids.
    """
    out: dict[int, list[AEdge]] = {}
    for e in g.a_edges:
        out.setdefault(e.src, []).append(e)
    for es in out.values():
        es.sort(key=lambda e: e.attr)
    ranks: dict[int, int] = {}
    stack = [g.root]
    while stack:
        nid = stack.pop()
        if nid in ranks:
            continue
        ranks[nid] = len(ranks)
        for e in reversed(out.get(nid, [])):
            if e.dst not in ranks:
                stack.append(e.dst)
    # Unreached nodes (possible only in hand-built graphs) go last, by id.
    for nid in sorted(g.nodes):
        if nid not in ranks:
            ranks[nid] = len(ranks)
    return ranks


def _dom_jsonable(dom: frozenset[Individual] | None):
    if dom is None:
        return "*"
    return [i.name for i in sorted(dom, key=Individual.sort_key)]


def _fillers_jsonable(fillers: set[Individual]):
    return [i.name for i in sorted(fillers, key=Individual.sort_key)]


def to_jsonable(g: DescriptionGraph) -> dict:
    """Structured dump with deterministic ordering; ``dom: "*"`` encodes
    the universal marker and ``max: "inf"`` the unbounded maximum."""
    ranks = _traversal_ranks(g)
    nodes = []
    for nid in sorted(g.nodes, key=lambda n: ranks[n]):
        node = g.nodes[nid]
        redges = []
        for e in sorted(node.r_edges, key=lambda e: e.role):
            redges.append({
                "role": e.role,
                "min": e.min,
                "max": "inf" if e.max == INF else int(e.max),
                "fillers": _fillers_jsonable(e.fillers),
                "restriction": to_jsonable(e.restriction),
            })
        nodes.append({
            "id": ranks[nid],
            "atoms": sorted(node.atoms),
            "dom": _dom_jsonable(node.dom),
            "redges": redges,
        })
    aedges = [
        {"src": ranks[e.src], "dst": ranks[e.dst], "attr": e.attr,
         "fillers": _fillers_jsonable(e.fillers)}
        for e in sorted(g.a_edges,
                        key=lambda e: (ranks[e.src], e.attr, ranks[e.dst]))
    ]
    return {
        "root": ranks[g.root],
        "incoherent": g.incoherent,
        "nodes": nodes,
        "aedges": aedges,
    }


def signature(g: DescriptionGraph):
    """Hashable structure identifying the graph up to node renaming.

    Intended for canonical graphs, where the (node, attribute) out-edges
    are unique and every node is reachable from the root.
    """
    ranks = _traversal_ranks(g)

    def node_sig(node: GraphNode):
        redges = tuple(sorted(
            (e.role, e.min, e.max,
             tuple(sorted(f.name for f in e.fillers)),
             signature(e.restriction))
            for e in node.r_edges))
        dom = None if node.dom is None else \
            tuple(sorted(f.name for f in node.dom))
        return (tuple(sorted(node.atoms)), dom, redges)

    nodes = tuple(node_sig(g.nodes[nid])
                  for nid in sorted(g.nodes, key=lambda n: ranks[n]))
    edges = tuple(sorted(
        (ranks[e.src], e.attr, ranks[e.dst],
         tuple(sorted(f.name for f in e.fillers)))
        for e in g.a_edges))
    return (g.incoherent, nodes, edges)


def isomorphic(g1: DescriptionGraph, g2: DescriptionGraph) -> bool:
    """Structural equality up to node renaming (canonical graphs)."""
    return signature(g1) == signature(g2)
