"""Tokenizer and recursive-descent parsers for descriptions and KB files.

The description grammar is a prefix/functional ASCII notation::

    desc  := name | "thing" | "classic-thing" | "host-thing" | "nothing"
           | "and(" desc ("," desc)+ ")" | "all(" pname "," desc ")"
           | "at-least(" int "," rname ")" | "at-most(" int "," rname ")"
           | "same-as((" aname ("," aname)* "),(" aname ("," aname)* "))"
           | "fills(" pname "," indiv ")" | "one-of(" indiv ("," indiv)* ")"
           | "primitive(" desc "," name ")"
           | "test(" name "," ("classic"|"host") ")"
    indiv := identifier | int | decimal | string-literal

KB files are line-oriented: ``role NAME``, ``attribute NAME``,
``individual NAME``, ``host-type NAME [subtype-of NAME]``,
``concept NAME := DESC``, ``disjoint NAME NAME ...``; ``#`` starts a
comment.  Concept bodies may reference concepts declared on any line;
host-type parents must be declared first.

With a knowledge base in hand the parser is strict: every role, attribute,
and individual must be declared.  Without one it infers — names used in
same-as chains are attributes, other role-or-attribute positions default
to roles, and bare names in individual positions are classic individuals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    HostConcept,
    HostThing,
    Individual,
    NamedRef,
    Nothing,
    OneOf,
    Primitive,
    REALM_CLASSIC,
    REALM_HOST,
    SameAs,
    Test,
    Thing,
    host_int,
    host_real,
    host_string,
)
from .kb import KbError, KnowledgeBase


class ParseError(Exception):
    """Syntax or name-resolution error with a source position."""

    def __init__(self, message: str, pos: int, line: int | None = None):
        self.message = message
        self.pos = pos
        self.line = line
        where = ("line %d, " % line if line is not None else "") + \
            "offset %d" % pos
        super().__init__("%s (%s)" % (message, where))


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<decimal>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<assign>:=)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_!?-]*)
""", re.VERBOSE)

KEYWORDS = frozenset({
    "and", "all", "at-least", "at-most", "same-as", "fills", "one-of",
    "primitive", "test", "thing", "classic-thing", "host-thing", "nothing",
})

# Graph node labels are reserved so user atoms never collide with them.
_RESERVED_ATOMS = frozenset({"THING", "CLASSIC-THING", "HOST-THING",
                             "NOTHING"})


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str, line: int | None = None) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError("unexpected character %r" % text[i], i, line)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), m.start()))
        i = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def _unquote(text: str) -> str:
    out = []
    i = 1
    while i < len(text) - 1:
        c = text[i]
        if c == "\\":
            i += 1
            c = text[i]
        out.append(c)
        i += 1
    return "".join(out)


def _same_as_attr_names(tokens: list[Token]) -> set[str]:
    """Names appearing inside same-as chains; used for kind inference when
    parsing without a knowledge base."""
    names: set[str] = set()
    for i, tok in enumerate(tokens):
        if tok.kind == "ident" and tok.text == "same-as":
            depth = 0
            for t in tokens[i + 1:]:
                if t.kind == "lparen":
                    depth += 1
                elif t.kind == "rparen":
                    depth -= 1
                    if depth <= 0:
                        break
                elif t.kind == "ident" and depth >= 2:
                    names.add(t.text)
    return names


class _DescriptionParser:
    def __init__(self, tokens: list[Token], kb: KnowledgeBase | None,
                 line: int | None = None,
                 inferred_attrs: set[str] | None = None):
        self.tokens = tokens
        self.kb = kb
        self.line = line
        self.pos = 0
        if inferred_attrs is None:
            inferred_attrs = _same_as_attr_names(tokens)
        self.inferred_attrs = inferred_attrs

    # -- token plumbing --

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail("expected %s, found %r" % (what, tok.text or "end of input"),
                      tok)
        return self.take()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.pos, self.line)

    # -- name classification --

    def kind_of(self, name: str) -> str | None:
        if self.kb is not None:
            kind = self.kb.kind_of(name)
            if kind is not None:
                return kind
        if name in self.inferred_attrs:
            return "attribute"
        return None

    def pname(self, what: str = "role or attribute") -> tuple[str, str]:
        tok = self.expect("ident", "a %s name" % what)
        kind = self.kind_of(tok.text)
        if kind in ("role", "attribute"):
            return tok.text, kind
        if kind is not None:
            self.fail("%s is declared as a %s, not a role or attribute"
                      % (tok.text, kind), tok)
        if self.kb is not None:
            self.fail("unknown role or attribute: %s" % tok.text, tok)
        return tok.text, "role"

    def rname(self) -> str:
        tok = self.expect("ident", "a role name")
        kind = self.kind_of(tok.text)
        if kind == "role":
            return tok.text
        if kind is not None:
            self.fail("number restrictions take a role; %s is declared as "
                      "a %s" % (tok.text, kind), tok)
        if self.kb is not None:
            self.fail("unknown role: %s" % tok.text, tok)
        return tok.text

    def aname(self) -> str:
        tok = self.expect("ident", "an attribute name")
        kind = self.kind_of(tok.text)
        if kind == "attribute":
            return tok.text
        if kind is not None:
            self.fail("same-as chains contain attributes only; %s is "
                      "declared as a %s" % (tok.text, kind), tok)
        if self.kb is not None:
            self.fail("unknown attribute: %s" % tok.text, tok)
        return tok.text

    def individual(self) -> Individual:
        tok = self.take()
        if tok.kind == "int":
            return host_int(int(tok.text))
        if tok.kind == "decimal":
            return host_real(float(tok.text))
        if tok.kind == "string":
            return host_string(_unquote(tok.text))
        if tok.kind == "ident":
            if self.kb is not None:
                if tok.text in self.kb.individuals:
                    return self.kb.individuals[tok.text]
                kind = self.kb.kind_of(tok.text)
                if kind is not None:
                    self.fail("%s is declared as a %s, not an individual"
                              % (tok.text, kind), tok)
                self.fail("unknown individual: %s" % tok.text, tok)
            return Individual(tok.text)
        self.fail("expected an individual", tok)

    # -- grammar --

    def description(self) -> Description:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail("expected a description", tok)
        name = tok.text
        if name == "thing":
            self.take()
            return Thing()
        if name == "classic-thing":
            self.take()
            return ClassicThing()
        if name == "host-thing":
            self.take()
            return HostThing()
        if name == "nothing":
            self.take()
            return Nothing()
        if name in KEYWORDS:
            return self.compound(name)
        self.take()
        if name in _RESERVED_ATOMS:
            self.fail("%s is reserved; use the lowercase keyword" % name, tok)
        if self.kb is not None:
            kind = self.kb.kind_of(name)
            if kind == "concept":
                return NamedRef(name)
            if kind == "host-type":
                return HostConcept(name)
            if kind is not None:
                self.fail("%s is declared as a %s, not a concept"
                          % (name, kind), tok)
        elif name in ("STRING", "NUMBER", "COMPLEX", "REAL", "INTEGER"):
            return HostConcept(name)
        return ConceptName(name)

    def compound(self, head: str) -> Description:
        self.take()
        self.expect("lparen", "'('")
        if head == "and":
            items = [self.description()]
            while self.peek().kind == "comma":
                self.take()
                items.append(self.description())
            if len(items) < 2:
                self.fail("and(...) needs at least two conjuncts")
            self.expect("rparen", "')'")
            return And(tuple(items))
        if head == "all":
            name, kind = self.pname()
            self.expect("comma", "','")
            body = self.description()
            self.expect("rparen", "')'")
            if kind == "attribute":
                return AllAttr(name, body)
            return AllRole(name, body)
        if head in ("at-least", "at-most"):
            tok = self.expect("int", "an integer")
            n = int(tok.text)
            self.expect("comma", "','")
            role = self.rname()
            self.expect("rparen", "')'")
            if head == "at-least":
                if n < 1:
                    raise ParseError("at-least bound must be positive",
                                     tok.pos, self.line)
                return AtLeast(n, role)
            return AtMost(n, role)
        if head == "same-as":
            left = self.attr_chain()
            self.expect("comma", "','")
            right = self.attr_chain()
            self.expect("rparen", "')'")
            return SameAs(left, right)
        if head == "fills":
            name, kind = self.pname()
            self.expect("comma", "','")
            who = self.individual()
            self.expect("rparen", "')'")
            if kind == "attribute":
                return FillsAttr(name, who)
            return FillsRole(name, who)
        if head == "one-of":
            members = [self.individual()]
            while self.peek().kind == "comma":
                self.take()
                members.append(self.individual())
            close = self.peek()
            self.expect("rparen", "')'")
            hosts = {m.is_host for m in members}
            if len(hosts) > 1:
                raise ParseError("one-of members must be all host values or "
                                 "all classic individuals", close.pos,
                                 self.line)
            return OneOf(tuple(members))
        if head == "primitive":
            body = self.description()
            self.expect("comma", "','")
            tag = self.expect("ident", "a primitive tag").text
            self.expect("rparen", "')'")
            return Primitive(body, tag)
        if head == "test":
            func = self.expect("ident", "a function name").text
            self.expect("comma", "','")
            realm_tok = self.expect("ident", "'classic' or 'host'")
            if realm_tok.text not in (REALM_CLASSIC, REALM_HOST):
                self.fail("test realm must be 'classic' or 'host'", realm_tok)
            self.expect("rparen", "')'")
            return Test(func, realm_tok.text)
        self.fail("unknown constructor %r" % head)

    def attr_chain(self) -> tuple[str, ...]:
        self.expect("lparen", "'('")
        names = [self.aname()]
        while self.peek().kind == "comma":
            self.take()
            names.append(self.aname())
        self.expect("rparen", "')'")
        return tuple(names)


def parse_description(text: str, kb: KnowledgeBase | None = None,
                      inferred_attrs: set[str] | None = None) -> Description:
    """Parse one description.  ``inferred_attrs`` pre-seeds attribute
    inference for knowledge-base-free parsing (the CLI uses this to keep
    two descriptions consistent with each other)."""
    tokens = tokenize(text)
    parser = _DescriptionParser(tokens, kb, inferred_attrs=inferred_attrs)
    d = parser.description()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ParseError("unexpected trailing input %r" % trailing.text,
                         trailing.pos)
    return d


def infer_attr_names(*texts: str) -> set[str]:
    names: set[str] = set()
    for text in texts:
        names |= _same_as_attr_names(tokenize(text))
    return names


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a line-oriented knowledge-base file."""
    kb = KnowledgeBase.empty()
    declared: dict[str, int] = {}
    concept_bodies: list[tuple[str, str, int]] = []

    def declare(name: str, lineno: int):
        if name in declared:
            raise ParseError("%s already declared on line %d"
                             % (name, declared[name]), 0, lineno)
        if kb.lattice.is_type(name):
            raise ParseError("%s is a built-in host type" % name, 0, lineno)
        declared[name] = lineno

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize(raw, line=lineno)
        if tokens[0].kind == "eof":
            continue
        head = tokens[0]
        if head.kind != "ident":
            raise ParseError("expected a declaration", head.pos, lineno)
        if head.text in ("role", "attribute", "individual"):
            if tokens[1].kind != "ident" or tokens[2].kind != "eof":
                raise ParseError("expected: %s NAME" % head.text,
                                 tokens[1].pos, lineno)
            name = tokens[1].text
            declare(name, lineno)
            if head.text == "role":
                kb.roles.add(name)
            elif head.text == "attribute":
                kb.attributes.add(name)
            else:
                kb.individuals[name] = Individual(name)
        elif head.text == "host-type":
            if tokens[1].kind != "ident":
                raise ParseError("expected: host-type NAME [subtype-of NAME]",
                                 tokens[1].pos, lineno)
            name = tokens[1].text
            parent = None
            if tokens[2].kind == "ident" and tokens[2].text == "subtype-of":
                if tokens[3].kind != "ident" or tokens[4].kind != "eof":
                    raise ParseError("expected a parent type name",
                                     tokens[3].pos, lineno)
                parent = tokens[3].text
            elif tokens[2].kind != "eof":
                raise ParseError("expected: host-type NAME [subtype-of NAME]",
                                 tokens[2].pos, lineno)
            declare(name, lineno)
            try:
                kb.lattice.add_type(name, parent)
            except KbError as exc:
                raise ParseError(str(exc), head.pos, lineno) from exc
        elif head.text == "concept":
            if tokens[1].kind != "ident" or tokens[2].kind != "assign":
                raise ParseError("expected: concept NAME := DESCRIPTION",
                                 tokens[1].pos, lineno)
            name = tokens[1].text
            declare(name, lineno)
            body_text = raw[tokens[2].pos + 2:]
            concept_bodies.append((name, body_text, lineno))
            kb.named[name] = Thing()  # placeholder until the second pass
        elif head.text == "disjoint":
            names = []
            for tok in tokens[1:]:
                if tok.kind == "eof":
                    break
                if tok.kind != "ident":
                    raise ParseError("expected concept names", tok.pos,
                                     lineno)
                names.append(tok.text)
            if len(names) < 2:
                raise ParseError("disjoint needs at least two names",
                                 head.pos, lineno)
            kb.disjoint_groups.append(frozenset(names))
        else:
            raise ParseError("unknown declaration %r" % head.text, head.pos,
                             lineno)

    # Second pass: concept bodies may reference any declared concept.
    for name, body_text, lineno in concept_bodies:
        tokens = tokenize(body_text, line=lineno)
        parser = _DescriptionParser(tokens, kb, line=lineno)
        body = parser.description()
        if parser.peek().kind != "eof":
            raise ParseError("unexpected trailing input %r"
                             % parser.peek().text, parser.peek().pos, lineno)
        kb.named[name] = body

    _check_acyclic(kb)
    return kb


def _check_acyclic(kb: KnowledgeBase) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {name: WHITE for name in kb.named}

    def refs(d: Description):
        from .descriptions import walk

        for node in walk(d):
            if isinstance(node, NamedRef):
                yield node.name

    def visit(name: str):
        color[name] = GREY
        for ref in refs(kb.named[name]):
            if ref not in color:
                continue
            if color[ref] == GREY:
                raise KbError("recursive named concept: %s" % ref)
            if color[ref] == WHITE:
                visit(ref)
        color[name] = BLACK

    for name in kb.named:
        if color[name] == WHITE:
            visit(name)
