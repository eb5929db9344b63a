"""Canonicalization of description graphs.

The canonical form is the fixpoint of a family of rewrite steps applied to
a graph and all of its nested restriction graphs:

* atom closure — seed CLASSIC-THING next to atomic concepts, HOST-THING
  next to host concepts, and close host concepts upward through the type
  lattice;
* realm and bound conflicts — a node in both realms, incomparable host
  types, an empty dom, a min above a max, or two atoms from one declared
  disjointness group mark the node incoherent;
* incoherence propagation — an incoherent node makes its whole graph
  incoherent (attributes are total, so every node must be satisfiable); an
  incoherent restriction forces the edge max to zero; a zero max marks the
  restriction incoherent;
* edge merging — two r-edges with the same role combine bounds and merge
  their restriction graphs; two a-edges with the same source and attribute
  collapse their targets.  Target collapses cascade, so they are driven by
  a union-find pass over the merge-pending node classes;
* individual bookkeeping — filler sets push into doms and mins, doms cap
  maxes, and contradictions between fillers and doms mark incoherence.

Each merge removes a node and every numeric step moves a bound
monotonically, so the fixpoint exists; ``canonicalize`` accepts two rule
schedules to let tests check that both reach isomorphic results.
"""

from __future__ import annotations

from .descriptions import (
    BUILTIN_ATOMS,
    CLASSIC_THING,
    HOST_TEST_ATOM_PREFIX,
    HOST_THING,
    Individual,
    NOTHING,
    THING,
)
from .graph import (
    AEdge,
    DescriptionGraph,
    GraphNode,
    REdge,
    incoherent_node,
    intersect_doms,
    merge_graphs,
    merge_nodes,
)
from .kb import HostLattice, KnowledgeBase

_DEFAULT_LATTICE = HostLattice()


def is_incoherent_node(node: GraphNode) -> bool:
    return NOTHING in node.atoms


def mark_node_incoherent(node: GraphNode) -> bool:
    """Replace the node's content with the incoherent shape; returns
    whether anything changed."""
    if node.atoms == {NOTHING} and not node.r_edges and node.dom is None:
        return False
    node.atoms = {NOTHING}
    node.r_edges = []
    node.dom = None
    return True


def mark_graph_incoherent(g: DescriptionGraph) -> bool:
    if g.incoherent:
        return False
    g.nodes = {}
    g.a_edges = []
    g.root = g.add_node(incoherent_node())
    g.incoherent = True
    return True


def propagate_incoherence(g: DescriptionGraph) -> bool:
    """Run only the incoherence-propagation steps to fixpoint: node
    incoherence sinks graphs, incoherent restrictions zero their maxes, and
    zero maxes sink their restrictions."""
    changed = False
    while True:
        round_changed = False
        for node in list(g.nodes.values()):
            for e in node.r_edges:
                round_changed |= propagate_incoherence(e.restriction)
                if e.restriction.incoherent and e.max != 0:
                    e.max = 0
                    round_changed = True
                if e.max == 0 and not e.restriction.incoherent:
                    round_changed |= mark_graph_incoherent(e.restriction)
                if e.min > e.max:
                    round_changed |= mark_node_incoherent(node)
        if any(is_incoherent_node(n) for n in g.nodes.values()):
            round_changed |= mark_graph_incoherent(g)
        if not round_changed:
            return changed
        changed = True


def canonicalize(g: DescriptionGraph,
                 kb: KnowledgeBase | None = None,
                 schedule: str = "standard") -> DescriptionGraph:
    """Return the canonical form of ``g``; the input is not modified.

    ``schedule`` picks the order in which rule families are tried within
    each fixpoint round ("standard" or "alternate"); the result is the
    same up to node renaming either way.
    """
    if schedule not in ("standard", "alternate"):
        raise ValueError("unknown schedule: %r" % schedule)
    lattice = kb.lattice if kb is not None else _DEFAULT_LATTICE
    groups = kb.disjoint_groups if kb is not None else []
    work = g.clone()
    _normalize_graph(work, lattice, groups, schedule)
    return work


def _normalize_graph(g: DescriptionGraph, lattice, groups, schedule) -> bool:
    if g.incoherent:
        return False
    changed_ever = False
    while True:
        changed = False
        # Descendant restriction graphs reach their own fixpoints first.
        for node in g.nodes.values():
            for e in node.r_edges:
                changed |= _normalize_graph(e.restriction, lattice, groups,
                                            schedule)
        if schedule == "standard":
            passes = (_node_local_pass, _redge_pass, _aedge_pass,
                      _individual_pass)
            node_order = list(g.nodes)
        else:
            passes = (_individual_pass, _aedge_pass, _redge_pass,
                      _node_local_pass)
            node_order = list(reversed(list(g.nodes)))
        for p in passes:
            changed |= p(g, node_order, lattice, groups)
            node_order = [n for n in node_order if n in g.nodes]
        if any(is_incoherent_node(n) for n in g.nodes.values()):
            mark_graph_incoherent(g)
            return True
        if not changed:
            return changed_ever
        changed_ever = True


# -- node-local steps -------------------------------------------------------


def _node_local_pass(g, node_order, lattice, groups) -> bool:
    changed = False
    for nid in node_order:
        node = g.nodes[nid]
        changed |= _close_atoms(node, lattice)
        changed |= _realm_conflicts(node, lattice)
        changed |= _disjointness(node, groups)
        for e in node.r_edges:
            if e.min > e.max:
                changed |= mark_node_incoherent(node)
                break
        node = g.nodes[nid]
        if node.dom is not None and not node.dom:
            changed |= mark_node_incoherent(node)
        changed |= _dom_typing(node, lattice)
        for e in node.r_edges:
            if e.restriction.incoherent and e.max != 0:
                e.max = 0
                changed = True
            if e.max == 0 and not e.restriction.incoherent:
                changed |= mark_graph_incoherent(e.restriction)
    return changed


def _is_host_test_atom(atom: str) -> bool:
    return atom.startswith(HOST_TEST_ATOM_PREFIX)


def _close_atoms(node: GraphNode, lattice) -> bool:
    """Seed realm markers and close host concepts upward."""
    add: set[str] = set()
    for atom in node.atoms:
        if atom in BUILTIN_ATOMS:
            continue
        if lattice.is_type(atom):
            add.add(HOST_THING)
            add.update(lattice.ancestors(atom))
        elif _is_host_test_atom(atom):
            # Opaque host-realm atom: realm marker only, no lattice closure.
            add.add(HOST_THING)
        else:
            add.add(CLASSIC_THING)
    if add - node.atoms:
        node.atoms |= add
        return True
    return False


def _realm_conflicts(node: GraphNode, lattice) -> bool:
    if NOTHING in node.atoms:
        return mark_node_incoherent(node)
    if HOST_THING in node.atoms and CLASSIC_THING in node.atoms:
        return mark_node_incoherent(node)
    hosts = sorted(a for a in node.atoms if lattice.is_type(a))
    for i, a in enumerate(hosts):
        for b in hosts[i + 1:]:
            if not lattice.comparable(a, b):
                return mark_node_incoherent(node)
    return False


def _disjointness(node: GraphNode, groups) -> bool:
    for group in groups:
        if len(group & node.atoms) >= 2:
            return mark_node_incoherent(node)
    return False


def _atom_admits_host_value(atom: str, ind: Individual, lattice) -> bool:
    """Whether a host value can be in the atom's extension.  Opaque host
    test atoms are black boxes, so they conservatively admit everything."""
    if atom in (THING, HOST_THING):
        return True
    if atom == NOTHING or atom == CLASSIC_THING:
        return False
    if lattice.is_type(atom):
        return lattice.literal_in(ind, atom)
    if _is_host_test_atom(atom):
        return True
    return False  # classic atomic concepts live in the other realm


def _dom_typing(node: GraphNode, lattice) -> bool:
    if node.dom is None:
        return False
    drop = {
        ind for ind in node.dom
        if ind.is_host and not all(
            _atom_admits_host_value(a, ind, lattice) for a in node.atoms)
    }
    if drop:
        node.dom = node.dom - drop
        return True
    return False


# -- r-edge merging ---------------------------------------------------------


def merge_r_edges(node: GraphNode, e1: REdge, e2: REdge) -> GraphNode:
    """Merge two r-edges with the same role on a copy of ``node``: max of
    mins, min of maxes, merged restrictions, unioned fillers."""
    if e1.role != e2.role:
        raise ValueError("r-edges must share a role to merge")
    merged = _merged_redge(e1, e2)
    out = node.clone()
    out.r_edges = [e.clone() for e in node.r_edges if e is not e1 and e is not e2]
    out.r_edges.append(merged)
    return out


def _merged_redge(e1: REdge, e2: REdge) -> REdge:
    return REdge(
        role=e1.role,
        min=max(e1.min, e2.min),
        max=min(e1.max, e2.max),
        restriction=merge_graphs(e1.restriction, e2.restriction),
        fillers=e1.fillers | e2.fillers,
    )


def _redge_pass(g, node_order, lattice, groups) -> bool:
    changed = False
    for nid in node_order:
        node = g.nodes[nid]
        idx_by_role: dict[str, int] = {}
        new_edges: list[REdge] = []
        merged_any = False
        for e in node.r_edges:
            if e.role in idx_by_role:
                i = idx_by_role[e.role]
                new_edges[i] = _merged_redge(new_edges[i], e)
                merged_any = True
            else:
                idx_by_role[e.role] = len(new_edges)
                new_edges.append(e)
        if merged_any:
            node.r_edges = new_edges
            changed = True
    return changed


# -- a-edge merging ---------------------------------------------------------


def merge_a_edges(g: DescriptionGraph, e1: AEdge, e2: AEdge) -> DescriptionGraph:
    """Merge two a-edges with the same source and attribute on a copy of
    ``g``: one edge remains, pointing at the merge of the two old targets,
    which replaces them in every other a-edge; fillers are unioned."""
    if (e1.src, e1.attr) != (e2.src, e2.attr):
        raise ValueError("a-edges must share source and attribute to merge")
    out = g.clone()
    c1 = next(e for e in out.a_edges
              if (e.src, e.attr, e.dst) == (e1.src, e1.attr, e1.dst))
    c2 = next(e for e in out.a_edges
              if (e.src, e.attr, e.dst) == (e2.src, e2.attr, e2.dst)
              and e is not c1)
    if c1.dst == c2.dst:
        c1.fillers |= c2.fillers
        out.a_edges.remove(c2)
        return out
    merged = merge_nodes(out.nodes[c1.dst], out.nodes[c2.dst])
    merged_id = c1.dst
    old = c2.dst
    out.nodes[merged_id] = merged
    del out.nodes[old]
    c1.fillers |= c2.fillers
    out.a_edges.remove(c2)
    for e in out.a_edges:
        if e.src == old:
            e.src = merged_id
        if e.dst == old:
            e.dst = merged_id
    return out


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != x:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # Deterministic representative: keep the smaller id.
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _aedge_pass(g, node_order, lattice, groups) -> bool:
    """Collapse duplicate (source, attribute) a-edges, cascading target
    merges through a union-find over the merge-pending node classes."""
    if not g.a_edges:
        return False
    uf = _UnionFind()
    while True:
        unions = 0
        groups_by_key: dict[tuple[int, str], set[int]] = {}
        for e in g.a_edges:
            groups_by_key.setdefault(
                (uf.find(e.src), e.attr), set()).add(uf.find(e.dst))
        for targets in groups_by_key.values():
            targets = sorted(targets)
            for other in targets[1:]:
                if uf.union(targets[0], other):
                    unions += 1
        if unions == 0:
            break

    classes: dict[int, list[int]] = {}
    for nid in g.nodes:
        classes.setdefault(uf.find(nid), []).append(nid)
    duplicate_edges = len(g.a_edges) != len(
        {(uf.find(e.src), e.attr, uf.find(e.dst)) for e in g.a_edges})
    if all(len(m) == 1 for m in classes.values()) and not duplicate_edges:
        return False

    new_nodes: dict[int, GraphNode] = {}
    for rep in sorted(classes):
        members = sorted(classes[rep])
        node = g.nodes[members[0]]
        for other in members[1:]:
            node = merge_nodes(node, g.nodes[other])
        new_nodes[rep] = node
    merged_edges: dict[tuple[int, str], AEdge] = {}
    order: list[AEdge] = []
    for e in g.a_edges:
        key = (uf.find(e.src), e.attr)
        if key in merged_edges:
            merged_edges[key].fillers |= e.fillers
        else:
            ne = AEdge(key[0], uf.find(e.dst), e.attr, set(e.fillers))
            merged_edges[key] = ne
            order.append(ne)
    g.nodes = new_nodes
    g.a_edges = order
    g.root = uf.find(g.root)
    return True


# -- individual bookkeeping -------------------------------------------------


def _individual_pass(g, node_order, lattice, groups) -> bool:
    changed = False
    # a-edges: filler multiplicity, dom pushing, filler/dom agreement.
    for e in g.a_edges:
        if len(e.fillers) > 1:
            changed |= mark_graph_incoherent(g)
            return changed
        end = g.nodes[e.dst]
        if e.fillers and end.dom is None:
            end.dom = frozenset(e.fillers)
            changed = True
        if e.fillers and end.dom is not None and not e.fillers <= end.dom:
            changed |= mark_graph_incoherent(g)
            return changed
        if end.dom is not None and len(end.dom) == 1:
            (only,) = end.dom
            if only not in e.fillers:
                e.fillers = {only}
                changed = True
    # r-edges: filler/dom subset rule and bound/cardinality arithmetic.
    for nid in node_order:
        if nid not in g.nodes:
            continue
        node = g.nodes[nid]
        for e in node.r_edges:
            if e.min < len(e.fillers):
                e.min = len(e.fillers)
                changed = True
            if e.restriction.incoherent:
                # Settled: the max is forced to zero elsewhere, and dom
                # arithmetic on the incoherent placeholder is meaningless.
                continue
            head = e.restriction.root_node
            if e.fillers and (head.dom is not None
                              and not e.fillers <= head.dom):
                changed |= mark_node_incoherent(node)
                break
            if head.dom is not None:
                if e.max > len(head.dom):
                    e.max = len(head.dom)
                    changed = True
                if e.min >= len(head.dom) and not head.dom <= e.fillers:
                    e.fillers |= head.dom
                    changed = True
            if e.max == len(e.fillers):
                new_dom = intersect_doms(head.dom, frozenset(e.fillers))
                if new_dom != head.dom:
                    head.dom = new_dom
                    changed = True
    return changed
