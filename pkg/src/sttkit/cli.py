"""Command-line front end: check, transport, render, countermodel,
graph-stats.

Exit codes: 0 success, 1 check failure, 2 domain refusal (for example,
asking for models of a theory flagged infinite-only).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from .countermodel import find_countermodel
from .errors import InfiniteOnlyTheory, SearchSpaceTooLarge, SttError, UnknownItem, UnknownTheory
from .graph import validate
from .morphism import Open, transport, translate_expr
from .notation import parse_expr
from .printer import print_compact
from .reader import Session, check_files, load_files
from .render import (
    render_model,
    render_theory_latex,
    render_theory_source,
    theorem_block_lines,
)
from .theory import Transported


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sttkit",
        description="Check, transport, render, and model-check typed theories.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and type-check source files")
    _add_paths(p_check)

    p_tr = sub.add_parser("transport",
                          help="translate a theorem or definition along a morphism")
    _add_paths(p_tr)
    p_tr.add_argument("--via", required=True, metavar="MORPHISM")
    p_tr.add_argument("--item", required=True, metavar="NAME")
    p_tr.add_argument("--name", default=None, help="override the generated name")
    p_tr.add_argument("--write", action="store_true",
                      help="append the result to the target theory's file")

    p_render = sub.add_parser("render", help="render theories")
    _add_paths(p_render)
    mode = p_render.add_mutually_exclusive_group(required=True)
    mode.add_argument("--latex", action="store_true")
    mode.add_argument("--compact", action="store_true")

    p_cm = sub.add_parser("countermodel",
                          help="search for a finite model refuting a conjecture")
    _add_paths(p_cm)
    p_cm.add_argument("--theory", default=None)
    p_cm.add_argument("--conjecture", required=True,
                      help="a named theorem/axiom or a sentence")
    p_cm.add_argument("--max-size", type=int, default=3)

    p_gs = sub.add_parser("graph-stats", help="machine-readable graph summary")
    _add_paths(p_gs)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (InfiniteOnlyTheory, SearchSpaceTooLarge) as err:
        print(err.diagnostic(), file=sys.stderr)
        return 2
    except SttError as err:
        print(err.diagnostic(), file=sys.stderr)
        return 1


def _add_paths(p: argparse.ArgumentParser):
    p.add_argument("paths", nargs="*", metavar="FILE")
    p.add_argument("--corpus", action="store_true",
                   help="use the bundled theory-graph corpus")


def _resolve_paths(args) -> list[str]:
    paths = list(args.paths)
    if args.corpus:
        paths = corpus_mod.corpus_paths() + paths
    if not paths:
        raise SttError("no input files (pass FILE arguments or --corpus)")
    return paths


def _dispatch(args) -> int:
    if args.command == "check":
        return _cmd_check(_resolve_paths(args))
    if args.command == "transport":
        return _cmd_transport(_resolve_paths(args), args)
    if args.command == "render":
        return _cmd_render(_resolve_paths(args), args)
    if args.command == "countermodel":
        return _cmd_countermodel(_resolve_paths(args), args)
    if args.command == "graph-stats":
        return _cmd_graph_stats(_resolve_paths(args))
    raise SttError(f"unknown command {args.command}")


def _cmd_check(paths: list[str]) -> int:
    session, errors = check_files(paths)
    for err in errors:
        print(err.diagnostic())
    open_lines = []
    for mid, m in sorted(session.morphisms.items()):
        for name in m.open_obligations():
            open_lines.append(f"{mid}: obligation {name} is open")
    for line in open_lines:
        print(line)
    if errors or open_lines:
        return 1
    print(f"ok: {len(session.theories)} theories, "
          f"{len(session.morphisms)} morphisms")
    return 0


def _cmd_transport(paths: list[str], args) -> int:
    session = load_files(paths)
    m = session.morphisms.get(args.via)
    if m is None:
        raise UnknownItem(f"no morphism {args.via}")
    source = session.theories[m.source]
    target = session.theories[m.target]
    updated = transport(m, args.item, source, target, args.name)
    if args.item in source.theorems:
        translated = translate_expr(m, source.theorems[args.item].statement,
                                    source, target)
    else:
        translated = translate_expr(m, source.definitions[args.item].body,
                                    source, target)
    print(print_compact(translated, session.notations))
    if not args.write:
        return 0
    if updated is target:
        print(f"# already present in {target.name}; nothing to write",
              file=sys.stderr)
        return 0
    name = args.name or f"{args.item}@{m.id}"
    path, end_line = session.theory_location[target.name]
    if args.item in source.theorems:
        lines = theorem_block_lines(name, translated,
                                    Transported(source.name, m.id, args.item),
                                    session.notations)
    else:
        d = source.definitions[args.item]
        const_name = f"{d.const_name}@{m.id}" if args.name is None else args.name
        lines = [f"  define {name} {const_name} := "
                 f"{print_compact(translated, session.notations)}"]
    with open(path, encoding="utf-8") as fh:
        content = fh.read().splitlines()
    content[end_line:end_line] = lines
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(content) + "\n")
    print(f"# wrote {name} to {path}", file=sys.stderr)
    return 0


def _cmd_render(paths: list[str], args) -> int:
    session = load_files(paths)
    chunks = []
    for name in session.theory_order:
        t = session.theories[name]
        if args.latex:
            chunks.append(render_theory_latex(t, session.notations))
        else:
            chunks.append(render_theory_source(t))
    sys.stdout.write("\n".join(chunks))
    return 0


def _cmd_countermodel(paths: list[str], args) -> int:
    session = load_files(paths)
    if args.theory is not None:
        t = session.theories.get(args.theory)
        if t is None:
            raise UnknownTheory(args.theory)
    elif len(session.theories) == 1:
        t = next(iter(session.theories.values()))
    else:
        raise SttError("multiple theories loaded; pick one with --theory")
    vocab = t.vocabulary()
    if args.conjecture in t.theorems:
        s = t.theorems[args.conjecture].statement
    elif args.conjecture in t.axioms:
        s = t.axioms[args.conjecture]
    else:
        s = parse_expr(args.conjecture, vocab, session.notations)
    found = find_countermodel(t, s, args.max_size)
    if found is None:
        print(f"none up to size {args.max_size}")
    else:
        sys.stdout.write(render_model(found, t.sig))
    return 0


def _cmd_graph_stats(paths: list[str]) -> int:
    session = load_files(paths)
    gname, graph = session.named_or_whole_graph()
    report = validate(graph)
    edges = []
    for summary in report.morphisms:
        edges.append({
            "id": summary.id,
            "source": summary.source,
            "target": summary.target,
            "kind": summary.kind,
            "open": list(summary.open),
            "asserted": summary.asserted,
            "model_evidence": summary.model_evidence,
            "by_axiom": summary.by_axiom,
            "by_theorem": summary.by_theorem,
        })
    stats = {
        "graph": gname,
        "theories": len(graph.theories),
        "morphisms": len(graph.morphisms),
        "inclusions": sum(1 for m in graph.morphisms.values()
                          if m.kind == "inclusion"),
        "obligations": {
            "open": report.open_count(),
            "asserted": sum(e["asserted"] for e in edges),
            "model_evidence": sum(e["model_evidence"] for e in edges),
            "by_axiom": sum(e["by_axiom"] for e in edges),
            "by_theorem": sum(e["by_theorem"] for e in edges),
        },
        "errors": report.error_count(),
        "edges": edges,
    }
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
