"""Knowledge-base services: host-type lattice, named-concept expansion,
primitive/test rewriting, disjointness groups, and taxonomy classification.

A knowledge base is immutable after loading except for the primitive-tag
registry, which grows monotonically the first time each tag is expanded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .descriptions import (
    AllAttr,
    AllRole,
    And,
    ClassicThing,
    ConceptName,
    Description,
    HostThing,
    Individual,
    NamedRef,
    Primitive,
    PRIMITIVE_ATOM_PREFIX,
    REALM_HOST,
    Test,
    TEST_ATOM_PREFIX,
)


class KbError(Exception):
    """Raised for knowledge-base level problems (redeclaration, recursion,
    unknown names, primitive-tag conflicts, expansion blow-up)."""


class HostLattice:
    """Subtype order over host concept names.

    The order must be a forest: every type has at most one parent, so two
    host concepts overlap only when one is an ancestor of the other.  The
    default lattice ships STRING and the numeric chain
    INTEGER < REAL < COMPLEX < NUMBER.  Literals type at their syntactic
    base (integer, decimal, string); membership in any other host concept
    follows the ancestor chain.
    """

    def __init__(self):
        self._parent: dict[str, str | None] = {
            "STRING": None,
            "NUMBER": None,
            "COMPLEX": "NUMBER",
            "REAL": "COMPLEX",
            "INTEGER": "REAL",
        }

    def is_type(self, name: str) -> bool:
        return name in self._parent

    def add_type(self, name: str, parent: str | None = None) -> None:
        if name in self._parent:
            raise KbError("host type %s already declared" % name)
        if parent is not None and parent not in self._parent:
            raise KbError("unknown parent host type %s" % parent)
        self._parent[name] = parent

    def ancestors(self, name: str) -> list[str]:
        """The type and all more general types, nearest first."""
        out = []
        cur: str | None = name
        while cur is not None:
            out.append(cur)
            cur = self._parent[cur]
        return out

    def leq(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def comparable(self, a: str, b: str) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def literal_in(self, ind: Individual, concept: str) -> bool:
        """Does a host value belong to the extension of a host concept?"""
        if not ind.is_host:
            return False
        return self.leq(ind.host_type, concept)

    def type_names(self) -> list[str]:
        return sorted(self._parent)


@dataclass
class KnowledgeBase:
    """Declared vocabulary plus named concepts and disjointness groups."""

    roles: set[str] = field(default_factory=set)
    attributes: set[str] = field(default_factory=set)
    individuals: dict[str, Individual] = field(default_factory=dict)
    lattice: HostLattice = field(default_factory=HostLattice)
    named: dict[str, Description] = field(default_factory=dict)
    disjoint_groups: list[frozenset[str]] = field(default_factory=list)
    primitives: dict[str, Description] = field(default_factory=dict)
    expansion_limit: int = 100_000

    @classmethod
    def empty(cls) -> "KnowledgeBase":
        return cls()

    def kind_of(self, name: str) -> str | None:
        if name in self.roles:
            return "role"
        if name in self.attributes:
            return "attribute"
        if name in self.individuals:
            return "individual"
        if self.lattice.is_type(name):
            return "host-type"
        if name in self.named:
            return "concept"
        return None


def primitive_atom(tag: str) -> str:
    return PRIMITIVE_ATOM_PREFIX + tag


def test_atom(func: str, realm: str) -> str:
    return "%s%s:%s" % (TEST_ATOM_PREFIX, realm, func)


def expand(d: Description, kb: KnowledgeBase) -> Description:
    """Rewrite a description so no named references, primitives, or test
    concepts remain.

    Named concepts are substituted by their (recursively expanded)
    definitions; a primitive becomes the conjunction of a minted atom and
    its necessary conditions; a test concept becomes an opaque minted atom
    seeded with the marker for its realm.  Reusing a primitive tag with a
    body that is not equivalent to the registered one is an error, as is
    expansion growth past ``kb.expansion_limit``.
    """
    budget = [kb.expansion_limit]

    def go(node: Description, active: frozenset[str]) -> Description:
        budget[0] -= 1
        if budget[0] < 0:
            raise KbError("expansion exceeds the configured size limit "
                          "(%d nodes)" % kb.expansion_limit)
        if isinstance(node, NamedRef):
            if node.name in active:
                raise KbError("recursive named concept: %s" % node.name)
            if node.name not in kb.named:
                raise KbError("unknown named concept: %s" % node.name)
            return go(kb.named[node.name], active | {node.name})
        if isinstance(node, And):
            return And(tuple(go(c, active) for c in node.items))
        if isinstance(node, AllRole):
            return AllRole(node.role, go(node.restriction, active))
        if isinstance(node, AllAttr):
            return AllAttr(node.attr, go(node.restriction, active))
        if isinstance(node, Primitive):
            body = go(node.body, active)
            _register_primitive(kb, node.tag, body)
            return And((ConceptName(primitive_atom(node.tag)), body))
        if isinstance(node, Test):
            atom = ConceptName(test_atom(node.func, node.realm))
            marker: Description = (
                HostThing() if node.realm == REALM_HOST else ClassicThing())
            return And((atom, marker))
        return node

    return go(d, frozenset())


def _register_primitive(kb: KnowledgeBase, tag: str, body: Description) -> None:
    if tag not in kb.primitives:
        kb.primitives[tag] = body
        return
    existing = kb.primitives[tag]
    if existing == body:
        return
    # The equivalence check may itself run subsumption, so import lazily.
    from . import subsume

    if not (subsume.subsumes(existing, body, kb)
            and subsume.subsumes(body, existing, kb)):
        raise KbError("primitive tag %r reused with a non-equivalent body"
                      % tag)


def apply_disjointness(g, kb: KnowledgeBase):
    """Mark nodes whose atoms hit a disjointness group twice, then rerun
    incoherence propagation.  Returns a new graph."""
    from . import normalize

    work = g.clone()
    _mark_disjoint(work, kb.disjoint_groups)
    normalize.propagate_incoherence(work)
    return work


def _mark_disjoint(g, groups) -> None:
    from . import normalize

    for node in g.nodes.values():
        for group in groups:
            if len(group & node.atoms) >= 2:
                normalize.mark_node_incoherent(node)
                break
        for e in node.r_edges:
            _mark_disjoint(e.restriction, groups)


@dataclass
class TaxonomyNode:
    members: list[str]
    parents: list[int]


@dataclass
class Taxonomy:
    """Subsumption DAG over the named concepts of a knowledge base.

    Node 0 is the THING root; mutually subsuming concepts collapse into one
    node and parent links are the transitive reduction of the subsumption
    preorder.
    """

    nodes: list[TaxonomyNode]

    def to_jsonable(self) -> object:
        return [
            {"node": i, "members": n.members, "parents": n.parents}
            for i, n in enumerate(self.nodes)
        ]


def classify(kb: KnowledgeBase) -> Taxonomy:
    """Build the taxonomy DAG for all named concepts in the base."""
    from . import normalize, subsume
    from .graph import translate

    names = sorted(kb.named)
    expanded = {n: expand(NamedRef(n), kb) for n in names}
    canon = {n: normalize.canonicalize(translate(expanded[n]), kb)
             for n in names}
    geq: dict[tuple[str, str], bool] = {}
    for a in names:
        for b in names:
            geq[(a, b)] = subsume.subsumes_graph(expanded[a], canon[b])
    equiv_thing = {n: subsume.subsumes_graph(expanded[n], _thing_graph())
                   for n in names}

    # Group names into equivalence classes, preserving alphabetical order.
    classes: list[list[str]] = []
    for n in names:
        for cls in classes:
            rep = cls[0]
            if geq[(n, rep)] and geq[(rep, n)]:
                cls.append(n)
                break
        else:
            classes.append([n])

    nodes = [TaxonomyNode(members=["THING"], parents=[])]
    index_of: dict[int, int] = {}
    for i, cls in enumerate(classes):
        if equiv_thing[cls[0]]:
            nodes[0].members.extend(cls)
            continue
        index_of[i] = len(nodes)
        nodes.append(TaxonomyNode(members=list(cls), parents=[]))

    def above(i: int, j: int) -> bool:
        """Class i strictly subsumes class j."""
        return geq[(classes[i][0], classes[j][0])] and \
            not geq[(classes[j][0], classes[i][0])]

    for i, idx in index_of.items():
        ancestors = [j for j in index_of if above(j, i)]
        nearest = [j for j in ancestors
                   if not any(above(j, k) for k in ancestors if k != j)]
        nodes[idx].parents = sorted(index_of[j] for j in nearest) or [0]
    return Taxonomy(nodes)


def _thing_graph():
    from . import subsume

    return subsume.thing_graph()
