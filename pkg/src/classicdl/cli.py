"""Command-line front end.

Subcommands: ``parse``, ``graph``, ``canon``, ``subsumes``, ``classify``,
``countermodel``, ``reduce``, ``fuzz``.  Output is deterministic JSON (or
"yes"/"no" for subsumption).  Exit codes: 0 success (and "yes"), 1 "no"
or a failed property run, 2 usage errors, 3 parse and knowledge-base
errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import randgen, reduction
from .countermodel import construct_graphical_world
from .descriptions import to_jsonable as ast_jsonable
from .graph import to_jsonable as graph_jsonable, translate
from .kb import KbError, KnowledgeBase, classify, expand
from .normalize import canonicalize
from .parsing import ParseError, infer_attr_names, parse_description, parse_kb
from .subsume import subsumes_graph
from .worlds import eval_graph, to_jsonable as world_jsonable

PARSE_ERROR_EXIT = 3


def _load_kb(path: str | None) -> KnowledgeBase:
    if path is None:
        return KnowledgeBase.empty()
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read())


def _parse_all(kb_path: str | None, *texts: str):
    """Parse several descriptions against one context.  Without a KB file,
    attribute inference is pooled across the texts so they stay mutually
    consistent."""
    kb = _load_kb(kb_path)
    inferred = infer_attr_names(*texts) if kb_path is None else None
    descs = [parse_description(t, kb if kb_path else None,
                               inferred_attrs=set(inferred or ()))
             for t in texts]
    return kb, descs


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="classicdl",
        description="Structural subsumption engine for CLASSIC "
                    "descriptions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        p = sub.add_parser(name, help=help_text)
        if "kb" in flags:
            p.add_argument("--kb", default=None, help="knowledge-base file")
        if "seed" in flags:
            p.add_argument("--seed", type=int, default=0)
        if "cases" in flags:
            p.add_argument("--cases", type=int, default=100)
        if "max-domain" in flags:
            p.add_argument("--max-domain", type=int, default=5)
        p.add_argument("--format", default="text", choices=["text"])
        return p

    p = add("parse", "parse a description and dump its AST", "kb")
    p.add_argument("description")
    p = add("graph", "translate a description to a raw graph", "kb")
    p.add_argument("description")
    p = add("canon", "translate and canonicalize a description", "kb")
    p.add_argument("description")
    p = add("subsumes", "does the first description subsume the second?",
            "kb")
    p.add_argument("subsumer")
    p.add_argument("subsumee")
    p = add("classify", "dump the taxonomy of a knowledge base", "kb")
    p = add("countermodel", "build a world separating two descriptions",
            "kb", "seed", "max-domain")
    p.add_argument("subsumer")
    p.add_argument("subsumee")
    p = add("reduce", "incompleteness report for a DIMACS 3CNF file")
    p.add_argument("cnf_file")
    p = add("fuzz", "run the soundness/completeness property suites",
            "seed", "cases", "max-domain")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ParseError, KbError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return PARSE_ERROR_EXIT


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "parse":
        _, (d,) = _parse_all(args.kb, args.description)
        _emit(ast_jsonable(d))
        return 0
    if cmd == "graph":
        kb, (d,) = _parse_all(args.kb, args.description)
        _emit(graph_jsonable(translate(expand(d, kb))))
        return 0
    if cmd == "canon":
        kb, (d,) = _parse_all(args.kb, args.description)
        _emit(graph_jsonable(canonicalize(translate(expand(d, kb)), kb)))
        return 0
    if cmd == "subsumes":
        kb, (d, c) = _parse_all(args.kb, args.subsumer, args.subsumee)
        yes = subsumes_graph(expand(d, kb),
                             canonicalize(translate(expand(c, kb)), kb))
        print("yes" if yes else "no")
        return 0 if yes else 1
    if cmd == "classify":
        kb = _load_kb(args.kb)
        _emit(classify(kb).to_jsonable())
        return 0
    if cmd == "countermodel":
        kb, (d, c) = _parse_all(args.kb, args.subsumer, args.subsumee)
        de = expand(d, kb)
        canon = canonicalize(translate(expand(c, kb)), kb)
        if subsumes_graph(de, canon):
            print("error: subsumption holds; no counter-model exists",
                  file=sys.stderr)
            return 1
        world, elem = construct_graphical_world(canon, steering=de, kb=kb)
        assert elem in eval_graph(canon, world)
        _emit(world_jsonable(world, distinguished=elem))
        return 0
    if cmd == "reduce":
        with open(args.cnf_file, encoding="utf-8") as fh:
            formula = reduction.parse_dimacs(fh.read())
        report = reduction.demonstrate_incompleteness(formula)
        _emit(report.to_jsonable())
        return 0
    if cmd == "fuzz":
        sound = randgen.soundness_run(args.seed, args.cases,
                                      worlds_per_case=10,
                                      max_domain=args.max_domain)
        complete = randgen.completeness_run(args.seed, args.cases)
        _emit({
            "seed": args.seed,
            "cases": args.cases,
            "soundness": {"positives": sound.positives,
                          "violations": sound.violations,
                          "failures": sound.failures},
            "completeness": {"negatives": complete.negatives,
                             "violations": complete.violations,
                             "failures": complete.failures},
        })
        return 1 if (sound.violations or complete.violations) else 0
    raise AssertionError("unhandled command %r" % cmd)


if __name__ == "__main__":
    sys.exit(main())
