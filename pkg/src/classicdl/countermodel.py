"""Graphical worlds: constructive models for canonical description graphs.

``construct_graphical_world`` builds a finite world with a distinguished
element inside the graph's extension.  Everything is allocated in a single
shared builder, so the disjoint unions the construction calls for come
free: every node of every (nested) island gets a fresh element.

With a steering description the free choices of the construction are made
against it, case by case on the description's shape — filler counts one
below or above the bound, wrong-realm fillers for missing edges, distinct
end values for attribute chains, dom picks outside an enumeration — so the
distinguished element lands inside the graph's extension but outside the
description's.  The result is verified by evaluation before it is
returned; a verification failure raises ``CounterModelError``.

Known limitation, inherent to the algorithm being modelled: a host-valued
dom can force the distinguished element to be a literal whose built-in
type memberships are fixed, so a host-concept subsumer that the structural
test rejects may still contain every admissible element.  Steering raises
``CounterModelError`` in that corner rather than fabricating a world.
"""

from __future__ import annotations

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
    HOST_TEST_ATOM_PREFIX,
    HOST_THING,
    HostConcept,
    HostThing,
    Individual,
    NOTHING,
    Nothing,
    OneOf,
    SameAs,
    THING,
    Thing,
    walk,
)
from .graph import DescriptionGraph, GraphNode, INF
from .kb import HostLattice, KnowledgeBase
from .subsume import subsumes_graph, thing_graph
from .worlds import (
    ClassicElement,
    HostElement,
    host_literal_name,
    Interpretation,
    element_in_graph,
    eval_description,
    host_element_for,
    signature_of_description,
    signature_of_graph,
)


class CounterModelError(Exception):
    """The steered construction could not produce a separating world."""


@dataclass
class NodePlan:
    realm: str | None = None              # override for THING-only nodes
    dom_pick: Individual | None = None    # forced dom/filler join
    dom_avoid: frozenset = frozenset()    # joins to rule out
    attr_set: dict = field(default_factory=dict)  # attr -> value spec


@dataclass
class EdgePlan:
    count: int | None = None
    counter_desc: Description | None = None
    dom_avoid: frozenset = frozenset()
    synthetic_realm: str | None = None    # fillers for a role with no edge


class _Builder:
    def __init__(self, lattice: HostLattice):
        self.world = Interpretation(lattice=lattice)
        self._next_classic = 0
        self._next_anon = 0

    def fresh_classic(self) -> ClassicElement:
        e = ClassicElement(self._next_classic)
        self._next_classic += 1
        self.world.classic.add(e)
        return e

    def fresh_anon(self, vtype: str | None = None) -> HostElement:
        e = HostElement(vtype, anon_id=self._next_anon)
        self._next_anon += 1
        self.world.hosts.add(e)
        return e

    def host_value(self, ind: Individual) -> HostElement:
        e = host_element_for(ind)
        self.world.hosts.add(e)
        return e

    def join_individual(self, name: str, elem) -> None:
        self.world.indiv_ext.setdefault(name, set()).add(elem)

    def add_membership(self, atom: str, elem) -> None:
        self.world.concept_ext.setdefault(atom, set()).add(elem)

    def set_attr(self, attr: str, src, dst) -> None:
        if not isinstance(src, ClassicElement):
            raise CounterModelError("attribute source off the classic realm")
        self.world.attr_ext.setdefault(attr, {})[src] = dst

    def add_role_pair(self, role: str, src, dst) -> None:
        self.world.role_ext.setdefault(role, set()).add((src, dst))


def construct_graphical_world(g: DescriptionGraph,
                              steering: Description | None = None,
                              kb: KnowledgeBase | None = None):
    """Build ``(world, distinguished)`` with the distinguished element in
    the canonical graph's extension; with ``steering`` given (and the
    structural test negative for it) also outside the steering
    description's extension."""
    if g.incoherent:
        raise ValueError("cannot build a world for an incoherent graph")
    lattice = kb.lattice if kb is not None else HostLattice()
    if steering is not None and subsumes_graph(steering, g):
        raise ValueError("the description subsumes the graph; no "
                         "counter-model exists")
    b = _Builder(lattice)
    plans: dict[int, NodePlan] = {}
    edge_plans: dict[tuple[int, str], EdgePlan] = {}
    if steering is not None:
        _plan(steering, g, g.root, plans, edge_plans, lattice)
    elems = _build_island(b, g, plans, edge_plans)
    distinguished = elems[g.root]
    _finalize(b, g, steering, lattice)
    world = b.world
    if not element_in_graph(g, distinguished, world):
        raise CounterModelError("constructed element fell outside the "
                                "graph's extension")
    if steering is not None and \
            distinguished in eval_description(steering, world):
        raise CounterModelError("constructed element did not escape the "
                                "steering description")
    return world, distinguished


def _finalize(b: _Builder, g: DescriptionGraph,
              steering: Description | None, lattice) -> None:
    """Interpret every name in sight: seed empty concept extensions, give
    every mentioned individual a non-empty extension, and materialize
    mentioned host values.  Fresh padding elements carry no other
    memberships, so existing extensions are unaffected."""
    sig = signature_of_graph(g, lattice)
    if steering is not None:
        sig = sig.merge(signature_of_description(steering, lattice))
    for atom in sig.atoms:
        b.world.concept_ext.setdefault(atom, set())
    for v in sig.host_values:
        b.host_value(v)
    for name in sig.individuals:
        if not b.world.indiv_ext.get(name):
            b.join_individual(name, b.fresh_classic())


# ---------------------------------------------------------------------------
# Building


def _island_incoming_fillers(g: DescriptionGraph) -> dict[int, set]:
    incoming: dict[int, set] = {}
    for e in g.a_edges:
        if e.fillers:
            incoming.setdefault(e.dst, set()).update(e.fillers)
    return incoming


def _build_island(b: _Builder, g: DescriptionGraph,
                  plans: dict[int, NodePlan],
                  edge_plans: dict[tuple[int, str], EdgePlan]) -> dict:
    incoming = _island_incoming_fillers(g)
    elems: dict[int, object] = {}
    for nid, node in g.nodes.items():
        elems[nid] = _build_node(b, nid, node, plans.get(nid),
                                 edge_plans, incoming.get(nid))
    for e in g.a_edges:
        b.set_attr(e.attr, elems[e.src], elems[e.dst])
    for nid, plan in plans.items():
        for attr, spec in plan.attr_set.items():
            b.set_attr(attr, elems[nid], _resolve_value(b, spec))
    return elems


def _resolve_value(b: _Builder, spec: str):
    if spec == "fresh-anon":
        return b.fresh_anon()
    if spec == "fresh-classic":
        return b.fresh_classic()
    raise CounterModelError("unknown attribute value spec %r" % spec)


def _minimal_host_type(node: GraphNode, lattice) -> str | None:
    """Most specific host concept among the node's atoms; the atoms form a
    chain in canonical graphs."""
    types = [a for a in node.atoms if lattice.is_type(a)]
    best = None
    for t in types:
        if best is None or lattice.leq(t, best):
            best = t
    return best


def _pick_join(node: GraphNode, plan: NodePlan | None,
               forced: set | None) -> Individual | None:
    """Which individual the node's element should realize."""
    if forced:
        pick = sorted(forced, key=Individual.sort_key)[0]
        if plan and pick in plan.dom_avoid:
            raise CounterModelError("a-edge filler forces an avoided join")
        return pick
    if plan and plan.dom_pick is not None:
        return plan.dom_pick
    if node.dom is None:
        return None
    avoid = plan.dom_avoid if plan else frozenset()
    for ind in sorted(node.dom, key=Individual.sort_key):
        if ind not in avoid:
            return ind
    raise CounterModelError("no admissible dom element remains")


def _build_node(b: _Builder, nid: int, node: GraphNode,
                plan: NodePlan | None, edge_plans, forced_fillers):
    lattice = b.world.lattice
    if HOST_THING in node.atoms:
        join = _pick_join(node, plan, forced_fillers)
        if join is not None:
            if not join.is_host:
                raise CounterModelError("classic join on a host node")
            elem = b.host_value(join)
        else:
            elem = b.fresh_anon(_minimal_host_type(node, lattice))
        for atom in node.atoms:
            if atom.startswith(HOST_TEST_ATOM_PREFIX):
                b.add_membership(atom, elem)
        return elem

    classicish = CLASSIC_THING in node.atoms or any(
        a not in (THING, NOTHING) and not lattice.is_type(a)
        for a in node.atoms)
    if not classicish and plan is not None and plan.realm == "host":
        return b.fresh_anon()
    elem = b.fresh_classic()
    for atom in node.atoms:
        if atom in (THING, CLASSIC_THING, NOTHING) or lattice.is_type(atom):
            continue
        b.add_membership(atom, elem)
    join = _pick_join(node, plan, forced_fillers)
    if join is not None:
        if join.is_host:
            raise CounterModelError("host join on a classic node")
        b.join_individual(join.name, elem)
    for e in node.r_edges:
        _build_redge(b, elem, e, edge_plans.get((nid, e.role)))
    for (pnid, role), eplan in edge_plans.items():
        if pnid == nid and eplan.synthetic_realm is not None:
            count = eplan.count if eplan.count is not None else 1
            for _ in range(count):
                filler = (b.fresh_anon() if eplan.synthetic_realm == "host"
                          else b.fresh_classic())
                b.add_role_pair(role, elem, filler)
    return elem


def _build_redge(b: _Builder, parent, e, plan: EdgePlan | None) -> None:
    head = e.restriction.root_node
    fillers = sorted(e.fillers, key=Individual.sort_key)
    counter = plan.counter_desc if plan else None
    filler_elems = []
    used: set[Individual] = set()

    if counter is not None:
        sub = _counter_build(b, counter, e.restriction)
        root_elem = sub[e.restriction.root]
        filler_elems.append(root_elem)
        j = _join_of(b, root_elem)
        if j is not None:
            used.add(j)

    if plan and plan.count is not None:
        k = plan.count
    elif counter is not None:
        k = max(e.min, len([f for f in fillers if f not in used]) + 1, 1)
        if e.max != INF:
            k = min(k, int(e.max))
    else:
        k = max(e.min, _bounded(e.min + 1, e.max))

    needed = [f for f in fillers if f not in used]
    avoid = plan.dom_avoid if plan else frozenset()
    pads: list[Individual | None] = []
    if head.dom is not None:
        for ind in sorted(head.dom, key=Individual.sort_key):
            if ind not in used and ind not in avoid and ind not in needed:
                pads.append(ind)
    remaining = k - len(filler_elems)
    picks: list[Individual | None] = list(needed)
    while len(picks) < remaining:
        picks.append(pads.pop(0) if pads else None)
    if len(picks) > remaining:
        raise CounterModelError(
            "cannot cover the edge's fillers within its bounds")

    for pick in picks:
        if pick is None and head.dom is not None:
            raise CounterModelError("ran out of distinct dom elements")
        sub_plans = {}
        if pick is not None:
            sub_plans[e.restriction.root] = NodePlan(dom_pick=pick)
        sub = _build_island(b, e.restriction, sub_plans, {})
        filler_elems.append(sub[e.restriction.root])

    for elem in filler_elems:
        b.add_role_pair(e.role, parent, elem)


def _bounded(value, cap):
    """min(value, cap) as an int; an unbounded cap leaves the value."""
    return value if cap == INF else int(min(value, cap))


def _join_of(b: _Builder, elem) -> Individual | None:
    if isinstance(elem, ClassicElement):
        name = b.world.owner_individual(elem)
        return Individual(name) if name is not None else None
    if isinstance(elem, HostElement) and not elem.is_anon:
        return Individual(host_literal_name(elem.vtype, elem.value),
                          elem.vtype, elem.value)
    return None


def _counter_build(b: _Builder, d: Description, g: DescriptionGraph) -> dict:
    plans: dict[int, NodePlan] = {}
    edge_plans: dict[tuple[int, str], EdgePlan] = {}
    _plan(d, g, g.root, plans, edge_plans, b.world.lattice)
    return _build_island(b, g, plans, edge_plans)


# ---------------------------------------------------------------------------
# Steering plans (mirrors the completeness argument, case by case)


def realm_of(d: Description, lattice: HostLattice) -> str:
    """Which realm the description's extension is confined to: "classic",
    "host", "either" (provably empty), or "thing" (the whole domain)."""
    host = classic = False
    for node in walk(d):
        if isinstance(node, (HostThing, HostConcept)):
            host = True
        elif isinstance(node, OneOf):
            if node.is_host:
                host = True
            else:
                classic = True
        elif isinstance(node, ConceptName):
            if node.name.startswith(HOST_TEST_ATOM_PREFIX):
                host = True
            else:
                classic = True
        elif isinstance(node, (ClassicThing, AllRole, AllAttr, AtLeast,
                               AtMost, SameAs, FillsRole, FillsAttr,
                               Nothing)):
            classic = True
    if host and classic:
        return "either"
    if host:
        return "host"
    if classic:
        return "classic"
    return "thing"


def _escape_realm(d: Description, lattice: HostLattice) -> str:
    """Realm in which a fresh bare element escapes the description."""
    return "classic" if realm_of(d, lattice) == "host" else "host"


def _node_plan(plans: dict[int, NodePlan], nid: int) -> NodePlan:
    if nid not in plans:
        plans[nid] = NodePlan()
    return plans[nid]


def _attr_edge(g: DescriptionGraph, nid: int, attr: str):
    for e in g.a_edges:
        if e.src == nid and e.attr == attr:
            return e
    return None


def _follow(g: DescriptionGraph, nid: int, chain):
    cur = nid
    taken = 0
    for attr in chain:
        e = _attr_edge(g, cur, attr)
        if e is None:
            return cur, taken
        cur = e.dst
        taken += 1
    return cur, taken


def _plan(d: Description, g: DescriptionGraph, nid: int,
          plans: dict[int, NodePlan],
          edge_plans: dict[tuple[int, str], EdgePlan],
          lattice: HostLattice) -> None:
    """Steer the island containing ``nid`` so its element escapes ``d``.

    Precondition: the structural subsumption test is negative for ``d``
    against the graph rooted at ``nid``.
    """
    view = g.rerooted(nid)
    node = g.nodes[nid]

    if isinstance(d, Thing):
        raise CounterModelError("THING admits no counter-model")
    if isinstance(d, Nothing):
        return  # nothing is escaped by every element of a coherent graph
    if HOST_THING in node.atoms and isinstance(
            d, (AllRole, AllAttr, AtLeast, AtMost, SameAs, FillsRole,
                FillsAttr)):
        # These constructors confine their extension to the classic realm;
        # a host element escapes them with no steering at all.
        return
    if isinstance(d, And):
        for item in d.items:
            if not subsumes_graph(item, view):
                _plan(item, g, nid, plans, edge_plans, lattice)
                return
        raise CounterModelError("no failing conjunct found")
    if isinstance(d, (ConceptName, HostConcept)):
        _plan_atom(d, node, nid, plans, lattice)
        return
    if isinstance(d, ClassicThing):
        if CLASSIC_THING not in node.atoms and HOST_THING not in node.atoms:
            _node_plan(plans, nid).realm = "host"
        return
    if isinstance(d, HostThing):
        if HOST_THING not in node.atoms:
            _node_plan(plans, nid).realm = "classic"
        return
    if isinstance(d, AtLeast):
        e = _role_edge(node, d.role)
        if e is None:
            if d.n > 1:
                edge_plans[(nid, d.role)] = EdgePlan(
                    count=d.n - 1, synthetic_realm="classic")
            return
        edge_plans[(nid, d.role)] = EdgePlan(count=_bounded(d.n - 1, e.max))
        return
    if isinstance(d, AtMost):
        e = _role_edge(node, d.role)
        if e is None:
            edge_plans[(nid, d.role)] = EdgePlan(
                count=d.n + 1, synthetic_realm="classic")
            return
        edge_plans[(nid, d.role)] = EdgePlan(count=max(e.min, d.n + 1))
        return
    if isinstance(d, AllRole):
        if subsumes_graph(d.restriction, thing_graph()):
            # The body covers everything, so the root must be non-classic.
            _node_plan(plans, nid).realm = "host"
            return
        e = _role_edge(node, d.role)
        if e is not None:
            edge_plans[(nid, d.role)] = EdgePlan(counter_desc=d.restriction)
        else:
            edge_plans[(nid, d.role)] = EdgePlan(
                count=1,
                synthetic_realm=_escape_realm(d.restriction, lattice))
        return
    if isinstance(d, AllAttr):
        if subsumes_graph(d.restriction, thing_graph()):
            _node_plan(plans, nid).realm = "host"
            return
        e = _attr_edge(g, nid, d.attr)
        if e is not None:
            _plan(d.restriction, g, e.dst, plans, edge_plans, lattice)
        else:
            realm = _escape_realm(d.restriction, lattice)
            _node_plan(plans, nid).attr_set[d.attr] = "fresh-" + (
                "classic" if realm == "classic" else "anon")
        return
    if isinstance(d, SameAs):
        _plan_same_as(d, g, nid, plans, lattice)
        return
    if isinstance(d, FillsRole):
        e = _role_edge(node, d.role)
        if e is not None:
            head = e.restriction.root_node
            count = e.min if head.dom is not None else max(
                e.min, len(e.fillers))
            edge_plans[(nid, d.role)] = EdgePlan(
                count=count, dom_avoid=frozenset({d.who}))
        return
    if isinstance(d, FillsAttr):
        e = _attr_edge(g, nid, d.attr)
        if e is not None:
            _node_plan(plans, e.dst).dom_avoid |= {d.who}
        return
    if isinstance(d, OneOf):
        members = frozenset(d.members)
        if node.dom is not None:
            _node_plan(plans, nid).dom_avoid |= members
        return
    raise CounterModelError("cannot steer against %r" % (d,))


def _role_edge(node: GraphNode, role: str):
    for e in node.r_edges:
        if e.role == role:
            return e
    return None


def _plan_atom(d, node, nid, plans, lattice) -> None:
    name = d.name
    if name in node.atoms:
        raise CounterModelError("atom already present; not a counter case")
    if isinstance(d, HostConcept) and HOST_THING in node.atoms:
        if node.dom is not None:
            outside = [v for v in sorted(node.dom, key=Individual.sort_key)
                       if not lattice.literal_in(v, name)]
            if not outside:
                raise CounterModelError(
                    "every admissible host value lies in %s; the structural "
                    "test under-approximates here" % name)
            plan = _node_plan(plans, nid)
            plan.dom_pick = outside[0]
        return
    # Fresh elements belong to no extra extensions, so the default build
    # already escapes a missing atom.


def _plan_same_as(d: SameAs, g: DescriptionGraph, nid: int,
                  plans: dict[int, NodePlan], lattice) -> None:
    l_pre, l_taken = _follow(g, nid, d.left[:-1])
    r_pre, r_taken = _follow(g, nid, d.right[:-1])
    l_full = l_taken == len(d.left) - 1 and \
        _attr_edge(g, l_pre, d.left[-1]) is not None
    r_full = r_taken == len(d.right) - 1 and \
        _attr_edge(g, r_pre, d.right[-1]) is not None

    if l_taken < len(d.left) - 1 or r_taken < len(d.right) - 1:
        # A prefix already breaks: its next attribute has no edge, and the
        # default world sends it to the host sink, killing the chain.
        return
    if l_full and r_full:
        # Both chains run through the graph but end at different nodes
        # (same-node endings would have satisfied the test); distinct nodes
        # get distinct elements, so nothing to steer.
        return
    if l_pre == r_pre:
        node = g.nodes[l_pre]
        if CLASSIC_THING not in node.atoms:
            _node_plan(plans, l_pre).realm = "host"
            return
        plan = _node_plan(plans, l_pre)
        la, ra = d.left[-1], d.right[-1]
        if la == ra:
            raise CounterModelError("shared tail on a classic node; not a "
                                    "counter case")
        if not l_full:
            plan.attr_set[la] = "fresh-anon"
        if not r_full:
            plan.attr_set[ra] = "fresh-anon"
        return
    # Prefixes end at distinct nodes: give any missing tail its own fresh
    # value; existing tails point at distinct nodes already.
    if not l_full:
        _node_plan(plans, l_pre).attr_set[d.left[-1]] = "fresh-anon"
    if not r_full:
        _node_plan(plans, r_pre).attr_set[d.right[-1]] = "fresh-anon"
