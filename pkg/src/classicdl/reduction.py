"""Encoding 3CNF unsatisfiability as a description subsumption question.

``encode`` builds, from a 3CNF formula, a knowledge base of individuals
carrying truth-value machinery and two concepts LOWER and UPPER such that,
were subsumption to consult the asserted facts about individuals, UPPER
would subsume LOWER exactly when the formula is unsatisfiable.  The
structural engine never consults those facts, so its verdict is uniformly
"no" — ``demonstrate_incompleteness`` runs both the engine and an
independent propositional brute-force check and flags the gap.

Truth values are the host strings "True" and "False", whose fixed
identities match the construction's intent.  A clause may repeat literals
(encoding shorter clauses); the conjunct count then uses the number of
distinct literals so the encoding stays satisfiable by design.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .kb import KnowledgeBase
from .parsing import parse_description, parse_kb
from .subsume import subsumes


@dataclass(frozen=True)
class Literal:
    var: str
    positive: bool

    def __str__(self):
        return self.var if self.positive else "~" + self.var


@dataclass(frozen=True)
class CnfFormula:
    variables: tuple[str, ...]
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        if not self.clauses:
            raise ValueError("a formula needs at least one clause")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError("clauses carry exactly three literals")
            for lit in clause:
                if lit.var not in self.variables:
                    raise ValueError("undeclared variable %s" % lit.var)


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF input; clauses of one or two literals are padded by
    repetition, wider clauses are rejected."""
    nvars = None
    clauses: list[tuple[Literal, Literal, Literal]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError("malformed DIMACS header: %r" % line)
            nvars = int(parts[2])
            continue
        if nvars is None:
            raise ValueError("clause before DIMACS header")
        nums = [int(tok) for tok in line.split()]
        if nums and nums[-1] == 0:
            nums = nums[:-1]
        if not nums:
            continue
        if len(nums) > 3:
            raise ValueError("clause wider than three literals: %r" % line)
        while len(nums) < 3:
            nums.append(nums[-1])
        lits = tuple(Literal("x%d" % abs(n), n > 0) for n in nums)
        clauses.append(lits)
    if nvars is None or not clauses:
        raise ValueError("no DIMACS problem found")
    variables = tuple("x%d" % i for i in range(1, nvars + 1))
    return CnfFormula(variables, tuple(clauses))


def random_cnf(rng: random.Random, nvars: int, nclauses: int) -> CnfFormula:
    variables = tuple("x%d" % i for i in range(1, nvars + 1))
    clauses = []
    for _ in range(nclauses):
        picks = [rng.choice(variables) for _ in range(3)]
        clauses.append(tuple(Literal(v, rng.random() < 0.5) for v in picks))
    return CnfFormula(variables, tuple(clauses))


# ---------------------------------------------------------------------------
# Propositional ground truth


def negate_to_dnf(f: CnfFormula) -> tuple[tuple[Literal, ...], ...]:
    """The negation of the formula as a disjunction of literal conjunctions
    (each disjunct negates one clause)."""
    return tuple(
        tuple(Literal(lit.var, not lit.positive) for lit in clause)
        for clause in f.clauses)


def check_validity_bruteforce(dnf, variables, limit: int = 20) -> bool:
    """True iff every assignment satisfies some disjunct."""
    if len(variables) > limit:
        raise ValueError("too many variables for brute force (%d > %d)"
                         % (len(variables), limit))
    for bits in itertools.product((False, True), repeat=len(variables)):
        env = dict(zip(variables, bits))
        if not any(all(env[l.var] == l.positive for l in disjunct)
                   for disjunct in dnf):
            return False
    return True


def truth_table_unsat(f: CnfFormula, limit: int = 20) -> bool:
    """Independent check that no assignment satisfies all clauses."""
    if len(f.variables) > limit:
        raise ValueError("too many variables for brute force")
    for bits in itertools.product((False, True), repeat=len(f.variables)):
        env = dict(zip(f.variables, bits))
        if all(any(env[l.var] == l.positive for l in clause)
               for clause in f.clauses):
            return False
    return True


# ---------------------------------------------------------------------------
# The encoding


@dataclass
class ReductionOutput:
    kb_text: str
    assertions: list[tuple[str, str]]  # (individual, description text)
    upper_text: str
    lower_text: str

    def kb(self) -> KnowledgeBase:
        return parse_kb(self.kb_text)


def _pos_name(var: str) -> str:
    return "P-" + var


def _neg_name(var: str) -> str:
    return "NP-" + var


def _lit_name(lit: Literal) -> str:
    return _pos_name(lit.var) if lit.positive else _neg_name(lit.var)


def encode(f: CnfFormula) -> ReductionOutput:
    """Build the knowledge base, per-individual descriptors, and the UPPER
    and LOWER concepts for a formula.

    Per variable p there are four individuals: the literal carriers P-p and
    NP-p (each with truthValue restricted to {"True","False"}) and the
    approvers Yes-p and No-p forcing opposite truth values onto them.  Per
    disjunct of the negated formula there is an individual C<i> whose
    conjuncts role carries exactly the disjunct's literals; the individual
    G collects the disjuncts.  LOWER wraps every descriptor onto a fresh
    dummy attribute; UPPER asks only that the formula attribute lands in
    VALID-FORMULAE.
    """
    dnf = negate_to_dnf(f)
    kb_lines = [
        "role conjuncts",
        "role disjunctsHolding",
        "attribute truthValue",
        "attribute approve",
        "attribute deny",
        "attribute formula",
    ]
    assertions: list[tuple[str, str]] = []
    lower_parts: list[str] = []

    def dummy(kind: int, tag: str) -> str:
        name = "dummy%d-%s" % (kind, tag)
        kb_lines.append("attribute %s" % name)
        return name

    truth_pair = 'one-of("True", "False")'
    for var in f.variables:
        pos, neg = _pos_name(var), _neg_name(var)
        yes, no = "Yes-" + var, "No-" + var
        for ind in (pos, neg, yes, no):
            kb_lines.append("individual %s" % ind)
        carrier = "all(truthValue, %s)" % truth_pair
        yes_descr = ('all(approve, and(one-of(%s, %s), all(truthValue, '
                     'one-of("True"))))' % (pos, neg))
        no_descr = ('all(deny, and(one-of(%s, %s), all(truthValue, '
                    'one-of("False"))))' % (pos, neg))
        for ind, descr, kind in ((pos, carrier, 1), (neg, carrier, 2),
                                 (yes, yes_descr, 3), (no, no_descr, 4)):
            assertions.append((ind, descr))
            lower_parts.append("all(%s, and(one-of(%s), %s))"
                               % (dummy(kind, var), ind, descr))

    disjunct_names = []
    for i, disjunct in enumerate(dnf, start=1):
        name = "C%d" % i
        disjunct_names.append(name)
        kb_lines.append("individual %s" % name)
        members = sorted({_lit_name(l) for l in disjunct})
        descr = "and(all(conjuncts, one-of(%s)), at-least(%d, conjuncts))" \
            % (", ".join(members), len(members))
        assertions.append((name, descr))
        lower_parts.append("all(%s, and(one-of(%s), %s))"
                           % (dummy(5, "c%d" % i), name, descr))

    kb_lines.append("individual G")
    g_descr = "all(disjunctsHolding, one-of(%s))" % ", ".join(disjunct_names)
    assertions.append(("G", g_descr))
    lower_parts.append("all(formula, and(one-of(G), %s))" % g_descr)

    kb_lines.append(
        "concept VALID-FORMULAE := and(at-least(1, disjunctsHolding), "
        "all(disjunctsHolding, all(conjuncts, all(truthValue, "
        'one-of("True")))))')

    return ReductionOutput(
        kb_text="\n".join(kb_lines) + "\n",
        assertions=assertions,
        upper_text="all(formula, VALID-FORMULAE)",
        lower_text="and(%s)" % ", ".join(lower_parts),
    )


@dataclass
class IncompletenessReport:
    formula_valid: bool       # the negated formula, i.e. the CNF is unsat
    engine_verdict: bool      # subsumes(UPPER, LOWER) from the engine
    gap: bool                 # valid but not derived

    def to_jsonable(self) -> dict:
        return {"validity": self.formula_valid,
                "engine_verdict": self.engine_verdict,
                "gap": self.gap}


def demonstrate_incompleteness(f: CnfFormula,
                               limit: int = 20) -> IncompletenessReport:
    """Run the propositional ground truth against the engine's verdict on
    (UPPER, LOWER).  The engine ignores the facts asserted about the
    individuals, so its verdict is no for every input; the gap flag is set
    exactly when the formula is actually valid."""
    valid = check_validity_bruteforce(negate_to_dnf(f), f.variables, limit)
    out = encode(f)
    kb = out.kb()
    upper = parse_description(out.upper_text, kb)
    lower = parse_description(out.lower_text, kb)
    verdict = subsumes(upper, lower, kb)
    return IncompletenessReport(formula_valid=valid, engine_verdict=verdict,
                                gap=valid and not verdict)
