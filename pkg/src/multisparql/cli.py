"""Command-line interface.

Exit codes: 0 success, 1 operational error (bad input, unreadable file),
2 findings (fuzz discrepancies, or ``check`` rejecting a program).
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

from . import mra
from .datalog import (
    DatalogError,
    check_nonrecursive,
    check_safe,
    eval_program,
    normalize,
    parse_atom,
    parse_program,
    render_program,
)
from .datalog.program import Atom, Var as DVar
from .evaluation import evaluate, render_table
from .harness import FAULTS, PIPELINES, FuzzConfig, inject, run_equivalence_campaign
from .multiset import dumps as dump_multiset
from .patterns import PatternError, parse_pattern, render_pattern
from .rdf import GraphSyntaxError, parse_graph, serialize_graph
from .rewrite import RewriteError, to_core
from .translate import (
    TranslationError,
    datalog_to_mra,
    datalog_to_sparql,
    mra_to_datalog,
    sparql_to_datalog,
)

EXIT_OK, EXIT_ERROR, EXIT_FINDINGS = 0, 1, 2


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")


def _goal(text: str, prog) -> Atom:
    """``q(X, Y)`` as written, or a bare predicate name expanded with fresh
    variables of the right arity."""
    if "(" in text:
        return parse_atom(text)
    arities = prog.arities()
    if text not in arities:
        raise DatalogError(f"unknown goal predicate {text}")
    return Atom(text, tuple(DVar(f"X{i}") for i in range(1, arities[text] + 1)))


def _substitutions_table(answers, goal: Atom) -> str:
    names = [v.name for v in goal.vars()]
    rows = [[th.as_dict().get(n, "") for n in names] + [str(c)] for th, c in answers.sorted_items()]
    header = names + ["count"]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _relation_table(rel: mra.Relation) -> str:
    header = list(rel.schema) + ["count"]
    rows = [[mra.render_value(v) for v in row] + [str(c)] for row, c in rel.sorted_rows()]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------------

def cmd_eval(args) -> int:
    g = parse_graph(_read(args.graph))
    p = parse_pattern(_read(args.query))
    omega = evaluate(p, g)
    if args.format == "json":
        print(dump_multiset(omega))
    else:
        sys.stdout.write(render_table(omega))
    return EXIT_OK


def cmd_eval_datalog(args) -> int:
    prog = parse_program(_read(args.program))
    goal = _goal(args.goal, prog)
    answers = eval_program(prog, goal)
    if args.format == "json":
        data = [[dict(th.items()), c] for th, c in answers.sorted_items()]
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(_substitutions_table(answers, goal))
    return EXIT_OK


def cmd_eval_mra(args) -> int:
    db = mra.parse_database(_read(args.db))
    rel = mra.eval_expr(mra.parse_expr(_read(args.expr)), db)
    if args.format == "json":
        data = {"schema": list(rel.schema), "rows": [[list(r), c] for r, c in rel.sorted_rows()]}
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(_relation_table(rel))
    return EXIT_OK


def _need(value, flag: str, what: str):
    if value is None:
        raise ValueError(f"{what} needs {flag}")
    return value


def _emit_side(text: str, path: str | None, label: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(f"\n{label}\n{text}")


def cmd_translate(args) -> int:
    src, dst = args.source, args.target
    text = _read(args.input)
    if src == "sparql":
        p = parse_pattern(text)
        core = to_core(p)
        if dst == "core":
            print(render_pattern(core))
            return EXIT_OK
        g = parse_graph(_read(_need(args.graph, "--graph", "translating a pattern")))
        bundle = sparql_to_datalog(core, g)
        if dst == "datalog":
            sys.stdout.write(f"% goal: {bundle.goal}\n" + render_program(bundle.program))
            return EXIT_OK
        if dst == "mra":
            expr, db = datalog_to_mra(normalize(bundle.program), bundle.goal)
            print(mra.render_expr(expr))
            _emit_side(mra.render_database(db), args.side_out, "# database")
            return EXIT_OK
    elif src == "datalog":
        prog = parse_program(text)
        goal = _goal(_need(args.goal, "--goal", "translating a program"), prog)
        normal = prog if args.assume_normalized else normalize(prog)
        if dst == "sparql":
            pattern, graph = datalog_to_sparql(normal, goal)
            print(render_pattern(pattern))
            _emit_side(serialize_graph(graph), args.side_out, "# graph")
            return EXIT_OK
        if dst == "mra":
            expr, db = datalog_to_mra(normal, goal)
            print(mra.render_expr(expr))
            _emit_side(mra.render_database(db), args.side_out, "# database")
            return EXIT_OK
        if dst == "datalog":
            sys.stdout.write(render_program(normal))
            return EXIT_OK
    elif src == "mra":
        db = mra.parse_database(_read(_need(args.db, "--db", "translating an expression")))
        prog, goal = mra_to_datalog(mra.parse_expr(text), db)
        if dst == "datalog":
            sys.stdout.write(f"% goal: {goal}\n" + render_program(prog))
            return EXIT_OK
        if dst == "sparql":
            pattern, graph = datalog_to_sparql(prog, goal)
            print(render_pattern(pattern))
            _emit_side(serialize_graph(graph), args.side_out, "# graph")
            return EXIT_OK
    raise ValueError(f"no translation from {src} to {dst}")


def cmd_normalize(args) -> int:
    sys.stdout.write(render_program(normalize(parse_program(_read(args.program)))))
    return EXIT_OK


def cmd_check(args) -> int:
    prog = parse_program(_read(args.program))
    status = EXIT_OK
    try:
        prog.arities()
    except DatalogError as exc:
        print(f"arity: {exc}")
        status = EXIT_FINDINGS
    violations = check_safe(prog)
    if violations:
        status = EXIT_FINDINGS
        for v in violations:
            print(f"unsafe: {v}")
    else:
        print("safe: yes")
    verdict = check_nonrecursive(prog)
    if verdict.ok:
        print("non-recursive: yes; order: " + " ".join(verdict.order))
    else:
        status = EXIT_FINDINGS
        print("non-recursive: no; cycle: " + " -> ".join(verdict.cycle))
    return status


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(
        seed=args.seed,
        iterations=args.iters,
        pipeline=args.pipeline,
        max_pattern_depth=args.depth,
        max_triples=args.max_triples,
    )
    fault = inject(args.inject) if args.inject else contextlib.nullcontext()
    with fault:
        report = run_equivalence_campaign(cfg, stop_after=1 if args.inject else None)
    text = report.dumps()
    if args.out:
        out = Path(args.out)
        (out / "witnesses").mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n", encoding="utf-8")
        for k, d in enumerate(report.discrepancies, 1):
            path = out / "witnesses" / f"{k:03d}-{d.check}.json"
            path.write_text(json.dumps(d.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    if args.inject:
        print(f"injected fault: {args.inject} ({FAULTS[args.inject].description})")
    print(f"pipeline={cfg.pipeline} seed={cfg.seed} iterations={cfg.iterations} "
          f"checks={report.checks_run} skipped={report.skipped} discrepancies={len(report.discrepancies)}")
    for d in report.discrepancies[:5]:
        print(f"  [{d.check}] iteration {d.iteration}: witness {json.dumps(d.witness, ensure_ascii=False)}")
    return EXIT_OK if report.clean else EXIT_FINDINGS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multisparql", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a graph pattern over a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-datalog", help="evaluate a Datalog program for a goal")
    p.add_argument("--program", required=True)
    p.add_argument("--goal", required=True, help="predicate name or atom such as q(X, Y)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_eval_datalog)

    p = sub.add_parser("eval-mra", help="evaluate a relational algebra expression")
    p.add_argument("--db", required=True)
    p.add_argument("--expr", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_eval_mra)

    p = sub.add_parser("translate", help="translate between formalisms")
    p.add_argument("--from", dest="source", choices=("sparql", "datalog", "mra"), required=True)
    p.add_argument("--to", dest="target", choices=("core", "datalog", "sparql", "mra"), required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--graph", help="graph file (sparql input)")
    p.add_argument("--db", help="database file (mra input)")
    p.add_argument("--goal", help="goal predicate or atom (datalog input)")
    p.add_argument("--side-out", help="write the generated graph or database here")
    p.add_argument("--assume-normalized", action="store_true",
                   help="translate a datalog program as is instead of normalizing it first")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("normalize", help="rewrite a program into the four rule shapes")
    p.add_argument("--program", required=True)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("check", help="report safety and recursion of a program")
    p.add_argument("--program", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fuzz", help="run a differential equivalence campaign")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--pipeline", choices=PIPELINES + ("all",), default="all")
    p.add_argument("--depth", type=int, default=3, help="maximum pattern depth")
    p.add_argument("--max-triples", type=int, default=8)
    p.add_argument("--out", help="directory for report.json and witnesses")
    p.add_argument("--inject", choices=sorted(FAULTS),
                   help="run with a deliberate bug to check the campaign notices it")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, GraphSyntaxError, PatternError, DatalogError, mra.MraError,
            TranslationError, RewriteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
