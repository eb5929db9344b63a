"""Finite possible worlds and extension evaluation.

A world carries a finite classic realm, a finite host carrier, extensions
for atomic concepts, roles, attributes, and classic individuals, and obeys
the modified semantics for individuals: a classic individual denotes a
non-empty set of domain elements, the sets of distinct individuals never
overlap, and number restrictions count role fillers modulo the congruence
"same element, or elements of one individual".

Host elements are concrete typed values; anonymous host elements stand in
for the infinitely many host values a real host language would provide.
Attributes are total: lookups fall back to a dedicated host "sink" element
that the constructors never use for anything meaningful.
"""

from __future__ import annotations

import itertools
import random
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
    NamedRef,
    NOTHING,
    Nothing,
    OneOf,
    Primitive,
    SameAs,
    Test,
    THING,
    Thing,
    walk,
)
from .graph import DescriptionGraph, GraphNode
from .kb import HostLattice

_DEFAULT_LATTICE = HostLattice()


class EvalError(Exception):
    """An atomic name or individual has no interpretation in the world."""


@dataclass(frozen=True)
class ClassicElement:
    eid: int

    def __str__(self):
        return "c%d" % self.eid


@dataclass(frozen=True)
class HostElement:
    """A host-realm element: a named literal value, or an anonymous extra
    instance of a host type (``vtype`` ``None`` means no modelled type)."""

    vtype: str | None
    value: object = None
    anon_id: int | None = None

    @property
    def is_anon(self) -> bool:
        return self.anon_id is not None

    def __str__(self):
        if self.is_anon:
            return "#%s%d" % (self.vtype or "opaque", self.anon_id)
        return host_literal_name(self.vtype, self.value)


def host_literal_name(vtype, value) -> str:
    """Canonical source spelling of a host literal."""
    from .descriptions import quote_string

    if vtype == "STRING":
        return quote_string(value)
    return repr(value) if vtype == "REAL" else str(value)


def host_element_for(ind: Individual) -> HostElement:
    if not ind.is_host:
        raise ValueError("not a host value: %r" % (ind,))
    return HostElement(ind.host_type, ind.value)


Element = object  # ClassicElement | HostElement


@dataclass
class Interpretation:
    """A finite possible world."""

    classic: set[ClassicElement] = field(default_factory=set)
    hosts: set[HostElement] = field(default_factory=set)
    concept_ext: dict[str, set] = field(default_factory=dict)
    role_ext: dict[str, set] = field(default_factory=dict)
    attr_ext: dict[str, dict] = field(default_factory=dict)
    indiv_ext: dict[str, set] = field(default_factory=dict)
    sink: HostElement = field(
        default_factory=lambda: HostElement(None, anon_id=-1))
    lattice: HostLattice = field(default_factory=lambda: _DEFAULT_LATTICE)

    def __post_init__(self):
        self.hosts.add(self.sink)

    def domain(self):
        return itertools.chain(sorted(self.classic, key=lambda e: e.eid),
                               sorted(self.hosts, key=str))

    def attr_value(self, attr: str, elem) -> Element | None:
        """The attribute's value at an element; None off the classic realm
        (attributes are functions on the classic realm only)."""
        if not isinstance(elem, ClassicElement):
            return None
        return self.attr_ext.get(attr, {}).get(elem, self.sink)

    def role_fillers(self, role: str, elem) -> list:
        if not isinstance(elem, ClassicElement):
            return []
        return [y for (x, y) in self.role_ext.get(role, ()) if x == elem]

    def individual_ext(self, ind: Individual) -> set:
        if ind.is_host:
            e = host_element_for(ind)
            return {e} if e in self.hosts else set()
        if ind.name not in self.indiv_ext:
            raise EvalError("uninterpreted individual: %s" % ind.name)
        return self.indiv_ext[ind.name]

    def owner_individual(self, elem) -> str | None:
        """The classic individual whose extension holds the element, if
        any; extensions are pairwise disjoint so there is at most one."""
        for name in self.indiv_ext:
            if elem in self.indiv_ext[name]:
                return name
        return None

    def congruence_key(self, elem):
        if isinstance(elem, ClassicElement):
            owner = self.owner_individual(elem)
            if owner is not None:
                return ("ind", owner)
        return elem

    def count_non_congruent(self, elems) -> int:
        return len({self.congruence_key(e) for e in elems})

    def atom_ext(self, atom: str) -> set:
        if atom not in self.concept_ext:
            raise EvalError("uninterpreted atomic concept: %s" % atom)
        return self.concept_ext[atom]

    def in_atom(self, atom: str, elem) -> bool:
        if atom == THING:
            return True
        if atom == NOTHING:
            return False
        if atom == CLASSIC_THING:
            return isinstance(elem, ClassicElement)
        if atom == HOST_THING:
            return isinstance(elem, HostElement)
        if self.lattice.is_type(atom):
            return (isinstance(elem, HostElement)
                    and elem.vtype is not None
                    and self.lattice.leq(elem.vtype, atom))
        return elem in self.atom_ext(atom)

    def check(self) -> None:
        """Validate the world invariants; raises ValueError on violation."""
        if self.classic & self.hosts:
            raise ValueError("realms overlap")
        for name, ext in self.indiv_ext.items():
            if not ext:
                raise ValueError("individual %s has empty extension" % name)
            if not ext <= self.classic:
                raise ValueError("individual %s outside classic realm" % name)
        seen: set = set()
        for name in sorted(self.indiv_ext):
            ext = self.indiv_ext[name]
            if ext & seen:
                raise ValueError("individual extensions overlap at %s" % name)
            seen |= ext
        for role, pairs in self.role_ext.items():
            for (x, y) in pairs:
                if not isinstance(x, ClassicElement):
                    raise ValueError("role %s source off classic realm" % role)
        for attr, table in self.attr_ext.items():
            for x in table:
                if not isinstance(x, ClassicElement):
                    raise ValueError("attr %s source off classic realm" % attr)


# ---------------------------------------------------------------------------
# Extension evaluation


def eval_description(d: Description, world: Interpretation) -> frozenset:
    """The exact extension of an expanded description in a world."""
    if isinstance(d, (NamedRef, Primitive, Test)):
        raise EvalError("description must be expanded before evaluation")
    if isinstance(d, Thing):
        return frozenset(world.domain())
    if isinstance(d, ClassicThing):
        return frozenset(world.classic)
    if isinstance(d, HostThing):
        return frozenset(world.hosts)
    if isinstance(d, Nothing):
        return frozenset()
    if isinstance(d, ConceptName):
        return frozenset(world.atom_ext(d.name))
    if isinstance(d, HostConcept):
        return frozenset(e for e in world.hosts
                         if world.in_atom(d.name, e))
    if isinstance(d, And):
        out = eval_description(d.items[0], world)
        for item in d.items[1:]:
            out &= eval_description(item, world)
        return out
    if isinstance(d, AllRole):
        inner = eval_description(d.restriction, world)
        return frozenset(
            e for e in world.classic
            if all(x in inner for x in world.role_fillers(d.role, e)))
    if isinstance(d, AllAttr):
        inner = eval_description(d.restriction, world)
        return frozenset(
            e for e in world.classic
            if world.attr_value(d.attr, e) in inner)
    if isinstance(d, AtLeast):
        return frozenset(
            e for e in world.classic
            if world.count_non_congruent(world.role_fillers(d.role, e)) >= d.n)
    if isinstance(d, AtMost):
        return frozenset(
            e for e in world.classic
            if world.count_non_congruent(world.role_fillers(d.role, e)) <= d.n)
    if isinstance(d, SameAs):
        out = set()
        for e in world.classic:
            lv = _chain_value(world, d.left, e)
            rv = _chain_value(world, d.right, e)
            if lv is not None and lv == rv:
                out.add(e)
        return frozenset(out)
    if isinstance(d, FillsRole):
        ext = world.individual_ext(d.who)
        return frozenset(
            e for e in world.classic
            if any(x in ext for x in world.role_fillers(d.role, e)))
    if isinstance(d, FillsAttr):
        ext = world.individual_ext(d.who)
        return frozenset(
            e for e in world.classic
            if world.attr_value(d.attr, e) in ext)
    if isinstance(d, OneOf):
        out: set = set()
        for m in d.members:
            out |= world.individual_ext(m)
        return frozenset(out)
    raise TypeError("not a description: %r" % (d,))


def _chain_value(world: Interpretation, chain, elem):
    """Value of an attribute composition; None when undefined (some prefix
    lands in the host realm, where attributes do not apply)."""
    cur = elem
    for attr in chain:
        cur = world.attr_value(attr, cur)
        if cur is None:
            return None
    return cur


def eval_graph(g: DescriptionGraph, world: Interpretation) -> frozenset:
    """The exact extension of a description graph in a world, by witness
    search over node-to-element assignments.

    A-edges force assignments functionally from the root, so the search
    only enumerates for nodes a hand-built graph left unreachable.
    """
    if g.incoherent:
        return frozenset()
    return frozenset(e for e in world.domain() if element_in_graph(g, e, world))


def element_in_graph(g: DescriptionGraph, elem, world: Interpretation) -> bool:
    return find_witness(g, elem, world) is not None


def find_witness(g: DescriptionGraph, elem,
                 world: Interpretation) -> dict | None:
    """Node-to-element assignment witnessing that the element belongs to
    the graph's extension, or None.

    The root maps to the element; every node's image satisfies its atoms,
    bounds, and dom; every a-edge's images are related by its attribute.
    Attribute application from the root forces the assignment, so only
    nodes a hand-built graph leaves unreachable are searched for.
    """
    if g.incoherent:
        return None
    assign: dict[int, object] = {g.root: elem}
    pending = list(g.a_edges)
    progress = True
    while progress and pending:
        progress = False
        still = []
        for e in pending:
            if e.src in assign:
                v = world.attr_value(e.attr, assign[e.src])
                if v is None:
                    return None
                if e.dst in assign:
                    if assign[e.dst] != v:
                        return None
                else:
                    assign[e.dst] = v
                progress = True
            else:
                still.append(e)
        pending = still
    unassigned = [nid for nid in g.nodes if nid not in assign]
    if unassigned:
        return _search_unassigned(g, unassigned, assign, world)
    return assign if _check_assignment(g, assign, world) else None


def _search_unassigned(g, unassigned, assign, world) -> dict | None:
    domain = list(world.domain())
    for values in itertools.product(domain, repeat=len(unassigned)):
        trial = dict(assign)
        trial.update(zip(unassigned, values))
        if _check_assignment(g, trial, world):
            return trial
    return None


def _check_assignment(g, assign, world) -> bool:
    for e in g.a_edges:
        v = world.attr_value(e.attr, assign[e.src])
        if v is None or v != assign[e.dst]:
            return False
        for f in e.fillers:
            if assign[e.dst] not in world.individual_ext(f):
                return False
    for nid, value in assign.items():
        if not _element_in_node(g.nodes[nid], value, world):
            return False
    return True


def _element_in_node(node: GraphNode, elem, world: Interpretation) -> bool:
    for atom in node.atoms:
        if not world.in_atom(atom, elem):
            return False
    for e in node.r_edges:
        fillers = world.role_fillers(e.role, elem)
        count = world.count_non_congruent(fillers)
        if not (e.min <= count <= e.max):
            return False
        for x in fillers:
            if not element_in_graph(e.restriction, x, world):
                return False
        for f in e.fillers:
            ext = world.individual_ext(f)
            if not any(x in ext for x in fillers):
                return False
    if node.dom is not None:
        if not any(elem in world.individual_ext(f) for f in node.dom):
            return False
    return True


# ---------------------------------------------------------------------------
# World merging


def merge_worlds(i1: Interpretation, i2: Interpretation) -> Interpretation:
    """Disjoint union on the classic realms (elements are relabelled),
    plain union on the host realms; extensions merge accordingly."""
    out, _, _ = merge_worlds_with_maps(i1, i2)
    return out


def merge_worlds_with_maps(i1: Interpretation, i2: Interpretation):
    out = Interpretation(lattice=i1.lattice)
    map1 = {e: ClassicElement(i) for i, e in
            enumerate(sorted(i1.classic, key=lambda e: e.eid))}
    off = len(map1)
    map2 = {e: ClassicElement(off + i) for i, e in
            enumerate(sorted(i2.classic, key=lambda e: e.eid))}

    def conv(m):
        def f(x):
            return m[x] if isinstance(x, ClassicElement) else x
        return f

    for world, m in ((i1, map1), (i2, map2)):
        f = conv(m)
        out.classic |= set(m.values())
        out.hosts |= world.hosts
        for atom, ext in world.concept_ext.items():
            out.concept_ext.setdefault(atom, set()).update(f(e) for e in ext)
        for role, pairs in world.role_ext.items():
            out.role_ext.setdefault(role, set()).update(
                (f(x), f(y)) for (x, y) in pairs)
        for attr, table in world.attr_ext.items():
            tgt = out.attr_ext.setdefault(attr, {})
            for x, y in table.items():
                tgt[f(x)] = f(y)
        for name, ext in world.indiv_ext.items():
            out.indiv_ext.setdefault(name, set()).update(f(e) for e in ext)
    return out, map1, map2


# ---------------------------------------------------------------------------
# Signatures and random worlds


@dataclass
class Signature:
    """The vocabulary a world must interpret."""

    atoms: set[str] = field(default_factory=set)
    roles: set[str] = field(default_factory=set)
    attrs: set[str] = field(default_factory=set)
    individuals: set[str] = field(default_factory=set)  # classic names
    host_values: set[Individual] = field(default_factory=set)
    max_number: int = 1

    def merge(self, other: "Signature") -> "Signature":
        return Signature(self.atoms | other.atoms,
                         self.roles | other.roles,
                         self.attrs | other.attrs,
                         self.individuals | other.individuals,
                         self.host_values | other.host_values,
                         max(self.max_number, other.max_number))


def _sig_add_individual(sig: Signature, ind: Individual) -> None:
    if ind.is_host:
        sig.host_values.add(ind)
    else:
        sig.individuals.add(ind.name)


def signature_of_description(d: Description,
                             lattice: HostLattice | None = None) -> Signature:
    lattice = lattice or _DEFAULT_LATTICE
    sig = Signature()
    for node in walk(d):
        if isinstance(node, ConceptName):
            sig.atoms.add(node.name)
        elif isinstance(node, AllRole):
            sig.roles.add(node.role)
        elif isinstance(node, AllAttr):
            sig.attrs.add(node.attr)
        elif isinstance(node, (AtLeast, AtMost)):
            sig.roles.add(node.role)
            sig.max_number = max(sig.max_number, node.n)
        elif isinstance(node, SameAs):
            sig.attrs.update(node.left)
            sig.attrs.update(node.right)
        elif isinstance(node, FillsRole):
            sig.roles.add(node.role)
            _sig_add_individual(sig, node.who)
        elif isinstance(node, FillsAttr):
            sig.attrs.add(node.attr)
            _sig_add_individual(sig, node.who)
        elif isinstance(node, OneOf):
            for m in node.members:
                _sig_add_individual(sig, m)
    return sig


def signature_of_graph(g: DescriptionGraph,
                       lattice: HostLattice | None = None) -> Signature:
    lattice = lattice or _DEFAULT_LATTICE
    sig = Signature()
    for sub in g.subgraphs():
        for e in sub.a_edges:
            sig.attrs.add(e.attr)
            for f in e.fillers:
                _sig_add_individual(sig, f)
        for node in sub.nodes.values():
            for atom in node.atoms:
                if atom not in (THING, CLASSIC_THING, HOST_THING, NOTHING) \
                        and not lattice.is_type(atom):
                    sig.atoms.add(atom)
            if node.dom is not None:
                for f in node.dom:
                    _sig_add_individual(sig, f)
            for e in node.r_edges:
                sig.roles.add(e.role)
                if e.max != float("inf"):
                    sig.max_number = max(sig.max_number, int(e.max))
                sig.max_number = max(sig.max_number, e.min)
                for f in e.fillers:
                    _sig_add_individual(sig, f)
    return sig


def sample_interpretation(sig: Signature, seed: int,
                          max_domain: int = 5,
                          lattice: HostLattice | None = None
                          ) -> Interpretation:
    """A seeded random world interpreting the signature.

    Classic individuals get disjoint extensions of one to three elements;
    roles get random filler sets; attributes get random total tables (the
    sink fallback covers whatever is left implicit).
    """
    rng = random.Random(seed)
    lattice = lattice or _DEFAULT_LATTICE
    world = Interpretation(lattice=lattice)
    need = max(2, len(sig.individuals))
    n_classic = rng.randint(need, max(need, max_domain))
    world.classic = {ClassicElement(i) for i in range(n_classic)}

    for ind in sig.host_values:
        world.hosts.add(host_element_for(ind))
    # Carrier margin: enough spare host elements per type that no query in
    # the signature can tell the finite carrier from an infinite realm.
    margin = sig.max_number + len(sig.host_values) + 4
    anon = 0
    for vtype in ("INTEGER", "REAL", "STRING", None):
        for _ in range(margin):
            world.hosts.add(HostElement(vtype, anon_id=anon))
            anon += 1

    elements = sorted(world.classic, key=lambda e: e.eid)
    pool = list(elements)
    rng.shuffle(pool)
    for name in sorted(sig.individuals):
        size = rng.randint(1, 3)
        if len(pool) < size:
            fresh = [ClassicElement(len(world.classic) + k)
                     for k in range(size)]
            world.classic.update(fresh)
            pool.extend(fresh)
        world.indiv_ext[name] = {pool.pop() for _ in range(size)}

    everything = sorted(world.classic, key=lambda e: e.eid) + \
        sorted(world.hosts, key=str)
    for atom in sorted(sig.atoms):
        if atom.startswith(HOST_TEST_ATOM_PREFIX):
            carrier = sorted(world.hosts, key=str)
        else:
            carrier = sorted(world.classic, key=lambda e: e.eid)
        world.concept_ext[atom] = {
            e for e in carrier if rng.random() < 0.5}
    for role in sorted(sig.roles):
        pairs = set()
        for e in sorted(world.classic, key=lambda e: e.eid):
            k = rng.randint(0, min(sig.max_number + 1, 4))
            pairs.update((e, rng.choice(everything)) for _ in range(k))
        world.role_ext[role] = pairs
    for attr in sorted(sig.attrs):
        table = {}
        for e in sorted(world.classic, key=lambda e: e.eid):
            if rng.random() < 0.8:
                table[e] = rng.choice(everything)
        world.attr_ext[attr] = table
    return world


# ---------------------------------------------------------------------------
# Bounded brute-force model search


def bounded_model_search(g: DescriptionGraph, k: int = 2,
                         lattice: HostLattice | None = None):
    """Exhaustively search for a world (over the graph's own signature)
    with at most ``k`` classic elements and filler sets of size at most
    ``k`` in which the graph's extension is non-empty.

    Returns ``(world, element)`` or ``None``.  Only practical for the tiny
    signatures used in tests; this is the independent check that canonical
    non-incoherent graphs are satisfiable and incoherent ones are not.
    """
    lattice = lattice or _DEFAULT_LATTICE
    sig = signature_of_graph(g, lattice)
    atoms = sorted(sig.atoms)
    roles = sorted(sig.roles)
    attrs = sorted(sig.attrs)
    inds = sorted(sig.individuals)

    hosts = {host_element_for(i) for i in sig.host_values}
    hosts |= {HostElement("INTEGER", anon_id=0), HostElement(None, anon_id=1)}

    for n_classic in range(0, k + 1):
        classic = [ClassicElement(i) for i in range(n_classic)]
        base = Interpretation(lattice=lattice)
        base.classic = set(classic)
        base.hosts |= hosts
        domain = classic + sorted(hosts | {base.sink}, key=str)
        for world in _enumerate_worlds(base, classic, domain, atoms, roles,
                                       attrs, inds, k):
            for e in world.domain():
                if element_in_graph(g, e, world):
                    return world, e
    return None


def _subsets(items, max_size):
    for r in range(0, min(len(items), max_size) + 1):
        yield from itertools.combinations(items, r)


def _enumerate_worlds(base, classic, domain, atoms, roles, attrs, inds, k):
    atom_choices = [list(_subsets(classic, len(classic))) for _ in atoms]
    # Each classic element belongs to at most one individual's extension.
    ind_assignments = itertools.product(range(len(inds) + 1),
                                        repeat=len(classic))
    for ind_pick in ind_assignments:
        ind_ext: dict[str, set] = {name: set() for name in inds}
        for e, which in zip(classic, ind_pick):
            if which > 0:
                ind_ext[inds[which - 1]].add(e)
        if inds and not all(ind_ext[n] for n in inds):
            continue  # individual extensions must be non-empty
        for atom_pick in itertools.product(*atom_choices):
            for role_table in _role_tables(roles, classic, domain, k):
                for attr_table in _attr_tables(attrs, classic, list(domain)):
                    world = Interpretation(lattice=base.lattice,
                                           sink=base.sink)
                    world.classic = set(classic)
                    world.hosts = set(base.hosts)
                    world.concept_ext = {
                        a: set(pick) for a, pick in zip(atoms, atom_pick)}
                    world.role_ext = role_table
                    world.attr_ext = attr_table
                    world.indiv_ext = {n: set(s) for n, s in ind_ext.items()}
                    yield world


def _role_tables(roles, classic, domain, k):
    if not roles:
        yield {}
        return
    per_elem = list(_subsets(domain, k))
    combos = itertools.product(per_elem, repeat=len(classic) * len(roles))
    for combo in combos:
        table: dict[str, set] = {}
        idx = 0
        for role in roles:
            pairs = set()
            for e in classic:
                pairs.update((e, y) for y in combo[idx])
                idx += 1
            table[role] = pairs
        yield table


def _attr_tables(attrs, classic, choices):
    if not attrs or not classic:
        yield {a: {} for a in attrs}
        return
    combos = itertools.product(choices, repeat=len(classic) * len(attrs))
    for combo in combos:
        table: dict[str, dict] = {}
        idx = 0
        for a in attrs:
            table[a] = {}
            for e in classic:
                table[a][e] = combo[idx]
                idx += 1
        yield table


def to_jsonable(world: Interpretation, distinguished=None) -> dict:
    """Structured dump of a world for the CLI and golden tests."""
    out = {
        "classic": [str(e) for e in sorted(world.classic,
                                           key=lambda e: e.eid)],
        "hosts": sorted(str(e) for e in world.hosts),
        "concepts": {a: sorted(str(e) for e in ext)
                     for a, ext in sorted(world.concept_ext.items())},
        "roles": {r: sorted([str(x), str(y)] for (x, y) in pairs)
                  for r, pairs in sorted(world.role_ext.items())},
        "attributes": {a: {str(x): str(y) for x, y in sorted(
            table.items(), key=lambda kv: kv[0].eid)}
            for a, table in sorted(world.attr_ext.items())},
        "individuals": {n: sorted(str(e) for e in ext)
                        for n, ext in sorted(world.indiv_ext.items())},
    }
    if distinguished is not None:
        out["distinguished"] = str(distinguished)
    return out
