"""Seeded random descriptions, description pairs, and property runners.

The corpus matches the acceptance envelope: nesting depth at most four,
number restrictions at most three, at most three classic individuals.
Individuals in generated descriptions are classic only; host values have
built-in type memberships that the structural test deliberately ignores,
so they are exercised by targeted unit tests instead of the random suites
(see the package docs).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .countermodel import CounterModelError, construct_graphical_world
from .descriptions import (
    AllAttr,
    AllRole,
    And,
    AtLeast,
    AtMost,
    ClassicThing,
    ConceptName,
    Description,
    FillsAttr,
    FillsRole,
    Individual,
    Nothing,
    OneOf,
    SameAs,
    Thing,
    to_text,
)
from .graph import translate
from .kb import KnowledgeBase
from .normalize import canonicalize
from .subsume import subsumes_graph
from .worlds import (
    eval_description,
    eval_graph,
    sample_interpretation,
    signature_of_description,
)

ATOMS = ("GAME", "PERSON", "TALL", "SMALL")
ROLES = ("r", "s")
ATTRS = ("f", "g", "h")
INDIVIDUALS = (Individual("P"), Individual("Q"), Individual("V"))


def corpus_kb() -> KnowledgeBase:
    kb = KnowledgeBase.empty()
    kb.roles.update(ROLES)
    kb.attributes.update(ATTRS)
    for ind in INDIVIDUALS:
        kb.individuals[ind.name] = ind
    return kb


def random_description(rng: random.Random, depth: int = 4) -> Description:
    """One random description with nesting depth at most ``depth``."""
    leaf_ops = ("atom", "atom", "one-of", "fills-role", "fills-attr",
                "at-least", "at-most", "same-as", "thing", "classic-thing",
                "nothing")
    deep_ops = leaf_ops + ("and", "and", "all-role", "all-role", "all-attr")
    op = rng.choice(deep_ops if depth > 0 else leaf_ops)
    if op == "atom":
        return ConceptName(rng.choice(ATOMS))
    if op == "thing":
        return Thing()
    if op == "classic-thing":
        return ClassicThing()
    if op == "nothing":
        return Nothing()
    if op == "one-of":
        k = rng.randint(1, len(INDIVIDUALS))
        return OneOf(tuple(rng.sample(INDIVIDUALS, k)))
    if op == "fills-role":
        return FillsRole(rng.choice(ROLES), rng.choice(INDIVIDUALS))
    if op == "fills-attr":
        return FillsAttr(rng.choice(ATTRS), rng.choice(INDIVIDUALS))
    if op == "at-least":
        return AtLeast(rng.randint(1, 3), rng.choice(ROLES))
    if op == "at-most":
        return AtMost(rng.randint(0, 3), rng.choice(ROLES))
    if op == "same-as":
        left = tuple(rng.choice(ATTRS) for _ in range(rng.randint(1, 2)))
        right = tuple(rng.choice(ATTRS) for _ in range(rng.randint(1, 2)))
        return SameAs(left, right)
    if op == "and":
        n = rng.randint(2, 3)
        return And(tuple(random_description(rng, depth - 1)
                         for _ in range(n)))
    if op == "all-role":
        return AllRole(rng.choice(ROLES), random_description(rng, depth - 1))
    return AllAttr(rng.choice(ATTRS), random_description(rng, depth - 1))


def random_pair(rng: random.Random) -> tuple[Description, Description]:
    """A (subsumer candidate, subsumee candidate) pair.  Mixes independent
    draws with deliberately related pairs so both answers appear often."""
    mode = rng.random()
    d = random_description(rng)
    if mode < 0.40:
        return d, random_description(rng)
    if mode < 0.65:
        # The subsumee strengthens the subsumer, so "yes" is likely.
        extra = random_description(rng, depth=2)
        return d, And((d, extra))
    if mode < 0.80:
        return d, d
    # Weaken a number restriction or wrap in a shared context.
    c = random_description(rng, depth=2)
    role = rng.choice(ROLES)
    n = rng.randint(1, 3)
    return (
        And((AtLeast(n, role), d)) if rng.random() < 0.5 else AtLeast(n, role),
        And((AtLeast(n + rng.randint(0, 1), role), c, d)),
    )


@dataclass
class PropertyRunStats:
    cases: int = 0
    positives: int = 0
    negatives: int = 0
    violations: int = 0
    failures: list[str] = field(default_factory=list)

    def record_failure(self, message: str) -> None:
        self.violations += 1
        if len(self.failures) < 10:
            self.failures.append(message)


def soundness_run(seed: int, cases: int, worlds_per_case: int = 50,
                  max_domain: int = 5) -> PropertyRunStats:
    """Whenever the engine answers yes, extension containment must hold in
    every sampled world."""
    rng = random.Random(seed)
    kb = corpus_kb()
    stats = PropertyRunStats()
    for case in range(cases):
        d, c = random_pair(rng)
        stats.cases += 1
        canon = canonicalize(translate(c), kb)
        if not subsumes_graph(d, canon):
            stats.negatives += 1
            continue
        stats.positives += 1
        sig = signature_of_description(d).merge(signature_of_description(c))
        for w in range(worlds_per_case):
            world = sample_interpretation(sig, seed=seed * 1_000_003
                                          + case * 101 + w,
                                          max_domain=max_domain)
            ext_c = eval_description(c, world)
            ext_d = eval_description(d, world)
            if not ext_c <= ext_d:
                stats.record_failure(
                    "containment violated: D=%s C=%s world=%d"
                    % (to_text(d), to_text(c), w))
                break
    return stats


def completeness_run(seed: int, cases: int) -> PropertyRunStats:
    """Whenever the engine answers no, the steered graphical world must
    produce a separating element."""
    rng = random.Random(seed)
    kb = corpus_kb()
    stats = PropertyRunStats()
    for _ in range(cases):
        d, c = random_pair(rng)
        stats.cases += 1
        canon = canonicalize(translate(c), kb)
        if subsumes_graph(d, canon):
            stats.positives += 1
            continue
        stats.negatives += 1
        if canon.incoherent:
            # Incoherent subsumees are below everything, so the test cannot
            # answer no for them; defensive only.
            stats.record_failure("incoherent graph answered no")
            continue
        try:
            world, elem = construct_graphical_world(canon, steering=d, kb=kb)
        except CounterModelError as exc:
            stats.record_failure(
                "construction failed: D=%s C=%s (%s)"
                % (to_text(d), to_text(c), exc))
            continue
        if elem not in eval_graph(canon, world):
            stats.record_failure(
                "witness outside subsumee: D=%s C=%s" % (to_text(d),
                                                         to_text(c)))
        elif elem in eval_description(d, world):
            stats.record_failure(
                "witness not separating: D=%s C=%s" % (to_text(d),
                                                       to_text(c)))
    return stats
