"""Random instance generators. Every generator takes an explicit
``random.Random`` so campaigns are reproducible from a seed."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .. import mra
from ..datalog.program import Atom, Const, Eq, Negated, Neq, Program, Rule
from ..datalog.program import Var as DVar
from ..patterns import (
    And,
    CAnd,
    CBound,
    CEq,
    CEqVar,
    CNot,
    COr,
    Diff,
    Except,
    ExceptStar,
    Filter,
    Minus,
    Opt,
    Select,
    TriplePattern,
    Union_,
    dom,
)
from ..rdf import Graph, Iri, Literal, Triple, Var

CORE_OPS = ("and", "union", "except", "filter", "select")
W3C_OPS = CORE_OPS + ("opt", "minus", "diff", "exceptstar")

DEFAULT_WEIGHTS = {
    "and": 3, "union": 2, "except": 1, "filter": 2, "select": 1,
    "opt": 2, "minus": 1, "diff": 1, "exceptstar": 1,
}


@dataclass
class FuzzConfig:
    seed: int = 0
    iterations: int = 100
    max_triples: int = 8
    max_iris: int = 4
    max_literals: int = 2
    max_pattern_depth: int = 3
    max_vars: int = 4
    predicates: tuple = ("p", "q")
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    max_disjuncts: int = 3
    max_rules: int = 8
    max_fact_copies: int = 20
    max_expr_depth: int = 4
    max_relation_copies: int = 50
    pipeline: str = "sparql-datalog"

    def __post_init__(self):
        for name in ("iterations", "max_iris", "max_pattern_depth", "max_vars", "max_rules",
                     "max_fact_copies", "max_expr_depth", "max_relation_copies", "max_disjuncts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_triples < 0 or self.max_literals < 0:
            raise ValueError("pool sizes must be non-negative")

    def iris(self):
        return [Iri(c) for c in "abcdefgh"[: self.max_iris]]

    def literals(self):
        return [Literal(s) for s in ("l", "m", "n", "o")[: self.max_literals]]

    def variables(self):
        return [Var(n) for n in ("x", "y", "z", "w", "v", "u")[: self.max_vars]]


# -- graphs and patterns ---------------------------------------------------------

def gen_graph(cfg: FuzzConfig, rng: random.Random) -> Graph:
    iris, preds = cfg.iris(), [Iri(p) for p in cfg.predicates]
    objects = iris + cfg.literals()
    n = rng.randint(0, cfg.max_triples)
    return Graph(Triple(rng.choice(iris), rng.choice(preds), rng.choice(objects)) for _ in range(n))


def gen_triple_pattern(cfg: FuzzConfig, rng: random.Random) -> TriplePattern:
    vs, iris = cfg.variables(), cfg.iris()
    while True:
        s = rng.choice(vs) if rng.random() < 0.8 else rng.choice(iris)
        p = rng.choice(vs) if rng.random() < 0.1 else Iri(rng.choice(cfg.predicates))
        r = rng.random()
        o = rng.choice(vs) if r < 0.7 else rng.choice(iris + cfg.literals() or iris)
        if any(isinstance(t, Var) for t in (s, p, o)):
            return TriplePattern(s, p, o)


def gen_atom(cfg: FuzzConfig, rng: random.Random, variables):
    vs = sorted(variables, key=lambda v: v.name)
    kind = rng.choice(("eq", "eqvar", "bound"))
    if kind == "bound":
        return CBound(rng.choice(vs))
    if kind == "eqvar" and len(vs) > 1:
        a, b = rng.sample(vs, 2)
        return CEqVar(a, b)
    return CEq(rng.choice(vs), rng.choice(cfg.iris() + cfg.literals()))


def gen_literal(cfg, rng, variables):
    atom = gen_atom(cfg, rng, variables)
    return CNot(atom) if rng.random() < 0.4 else atom


def gen_constraint(cfg: FuzzConfig, rng: random.Random, variables, atomic: bool = False):
    """A filter constraint over ``variables``; atomic ones are an atom or a
    negated atom. Others are conjunctions of up to two clauses of at most
    ``cfg.max_disjuncts`` literals, sometimes disguised by De Morgan."""
    if atomic:
        return gen_literal(cfg, rng, variables)
    clauses = []
    for _ in range(rng.randint(1, 2)):
        lits = [gen_literal(cfg, rng, variables) for _ in range(rng.randint(1, cfg.max_disjuncts))]
        clause = lits[0]
        for lit in lits[1:]:
            clause = COr(clause, lit)
        clauses.append(clause)
    out = clauses[0]
    for c in clauses[1:]:
        out = CAnd(out, c)
    if rng.random() < 0.2:
        out = CNot(CNot(out))
    return out


def gen_pattern(cfg: FuzzConfig, rng: random.Random, target: str = "core", depth: int | None = None):
    """Well-formed pattern of at most ``depth`` levels. ``core`` patterns use
    only core operators and atomic filters."""
    if target not in ("core", "w3c"):
        raise ValueError(f"unknown target {target!r}")
    depth = cfg.max_pattern_depth if depth is None else depth
    ops = [op for op in (CORE_OPS if target == "core" else W3C_OPS) if cfg.weights.get(op, 0) > 0]
    atomic = target == "core"

    def gen(d):
        if d <= 1 or not ops or rng.random() < 0.25:
            return gen_triple_pattern(cfg, rng)
        op = rng.choices(ops, weights=[cfg.weights[o] for o in ops])[0]
        if op == "filter":
            child = gen(d - 1)
            if not dom(child):
                return child
            return Filter(child, gen_constraint(cfg, rng, dom(child), atomic))
        if op == "select":
            child = gen(d - 1)
            vs = sorted(dom(child), key=lambda v: v.name)
            return Select(frozenset(v for v in vs if rng.random() < 0.6), child)
        left, right = gen(d - 1), gen(d - 1)
        if op == "and":
            return And(left, right)
        if op == "union":
            return Union_(left, right)
        if op == "except":
            if dom(left) != dom(right):
                shared = dom(left) & dom(right)
                left, right = Select(shared, left), Select(shared, right)
            return Except(left, right)
        if op == "opt":
            if dom(right) and rng.random() < 0.5:
                right = Filter(right, gen_constraint(cfg, rng, dom(right), atomic=False))
            return Opt(left, right)
        return {"minus": Minus, "diff": Diff, "exceptstar": ExceptStar}[op](left, right)

    return gen(depth)


# -- Datalog programs ----------------------------------------------------------------

DL_CONSTANTS = ("a", "b", "c")
DL_VARS = tuple(DVar(n) for n in ("X", "Y", "Z", "W"))


def _gen_facts(cfg: FuzzConfig, rng: random.Random, edb: dict) -> list:
    facts, budget = [], rng.randint(0, cfg.max_fact_copies)
    preds = sorted(edb)
    while budget > 0 and preds:
        pred = rng.choice(preds)
        n = min(budget, rng.randint(1, 3))
        atom = Atom(pred, tuple(Const(rng.choice(DL_CONSTANTS)) for _ in range(edb[pred])))
        facts.append((atom, n))
        budget -= n
    return facts


def gen_program(cfg: FuzzConfig, rng: random.Random) -> tuple[Program, Atom]:
    """Safe non-recursive program with constants, repeated variables,
    comparisons and negation anywhere in rule bodies, plus a pure goal."""
    edb = {f"e{i}": rng.randint(0, 2) for i in range(1, 4)}
    preds = dict(edb)
    rules = []
    idb: list[str] = []
    for _ in range(rng.randint(1, cfg.max_rules)):
        if idb and rng.random() < 0.3:
            head_pred = idb[-1]
            usable = [p for p in preds if p != head_pred]
        else:
            head_pred = f"q{len(idb) + 1}"
            usable = list(preds)
            idb.append(head_pred)
        body = []
        for _ in range(rng.randint(1, 2)):
            pred = rng.choice(usable)
            args = tuple(
                rng.choice(DL_VARS[:3]) if rng.random() < 0.8 else Const(rng.choice(DL_CONSTANTS))
                for _ in range(preds[pred])
            )
            body.append(Atom(pred, args))
        safe = list(dict.fromkeys(v for a in body for v in a.vars()))
        if rng.random() < 0.3:
            new = next((v for v in DL_VARS if v not in safe), None)
            if new is not None:
                other = rng.choice(safe) if safe and rng.random() < 0.5 else Const(rng.choice(DL_CONSTANTS))
                body.append(Eq(new, other))
                safe.append(new)
        terms = safe + [Const(c) for c in DL_CONSTANTS]
        if rng.random() < 0.3 and safe:
            cls = Neq if rng.random() < 0.7 else Eq
            body.append(cls(rng.choice(safe), rng.choice(terms)))
        if rng.random() < 0.35:
            pred = rng.choice(usable)
            args = tuple(rng.choice(terms) if safe else Const(rng.choice(DL_CONSTANTS)) for _ in range(preds[pred]))
            body.append(Negated(Atom(pred, args)))
        if head_pred in preds:
            arity = preds[head_pred]
        else:
            arity = rng.randint(0, 2)
            preds[head_pred] = arity
        if not safe and arity:
            head_args = tuple(Const(rng.choice(DL_CONSTANTS)) for _ in range(arity))
        else:
            head_args = tuple(rng.choice(terms) if rng.random() < 0.85 else Const(rng.choice(DL_CONSTANTS))
                              for _ in range(arity))
        if arity and safe and rng.random() < 0.85:
            head_args = tuple(rng.choice(safe) for _ in range(arity))
        rules.append(Rule(Atom(head_pred, head_args), tuple(body)))
    prog = Program(tuple(rules), tuple(_gen_facts(cfg, rng, edb)))
    goal_pred = rng.choice(idb[-2:])
    return prog, Atom(goal_pred, DL_VARS[: preds[goal_pred]])


def gen_normalized_program(cfg: FuzzConfig, rng: random.Random) -> tuple[Program, Atom]:
    """Program built directly from the four normal-form rule shapes."""
    edb = {f"e{i}": rng.randint(0, 2) for i in range(1, 4)}
    preds = dict(edb)
    order = list(edb)
    rules = []
    idb: list[str] = []

    def pure(pred):
        return Atom(pred, tuple(rng.sample(DL_VARS, preds[pred])))

    for _ in range(rng.randint(1, cfg.max_rules)):
        reuse = idb[-1] if idb and rng.random() < 0.3 else None
        usable = [p for p in order if p != reuse]
        shape = rng.choice(("projection", "selection", "join", "negation"))
        first = pure(rng.choice(usable))
        fv = list(first.args)
        if shape == "projection":
            body = (first,)
            head_vars = rng.sample(fv, rng.randint(0, len(fv)))
        elif shape == "selection" and fv:
            comps = []
            for _ in range(rng.randint(1, 2)):
                cls = rng.choice((Eq, Neq))
                other = rng.choice(fv + [Const(c) for c in DL_CONSTANTS])
                comps.append(cls(rng.choice(fv), other))
            body = (first, *comps)
            head_vars = rng.sample(fv, len(fv))
        elif shape == "negation":
            candidates = [p for p in usable if preds[p] <= len(fv)]
            pred = rng.choice(candidates)
            body = (first, Negated(Atom(pred, tuple(rng.sample(fv, preds[pred])))))
            head_vars = rng.sample(fv, len(fv))
        else:
            second = pure(rng.choice(usable))
            body = (first, second)
            union = list(dict.fromkeys(fv + list(second.args)))
            head_vars = rng.sample(union, len(union))
        # reuse is never among the body predicates, so this stays acyclic
        if reuse is not None and preds[reuse] == len(head_vars):
            head_pred = reuse
        else:
            head_pred = f"q{len(idb) + 1}"
            idb.append(head_pred)
            preds[head_pred] = len(head_vars)
            order.append(head_pred)
        rules.append(Rule(Atom(head_pred, tuple(head_vars)), body))
    prog = Program(tuple(rules), tuple(_gen_facts(cfg, rng, edb)))
    goal_pred = rng.choice(idb[-2:])
    return prog, Atom(goal_pred, DL_VARS[: preds[goal_pred]])


# -- relational algebra ------------------------------------------------------------------

MRA_ATTRS = ("A", "B", "C")
MRA_VALUES = ("a", "b", "c")


def gen_database(cfg: FuzzConfig, rng: random.Random) -> dict:
    db = {}
    budget = cfg.max_relation_copies
    for i in range(1, 4):
        k = rng.randint(0, 2)
        schema = tuple(sorted(rng.sample(MRA_ATTRS, k)))
        rows = []
        for _ in range(rng.randint(0, 5)):
            n = rng.randint(1, 3)
            if n > budget:
                break
            budget -= n
            rows.append((tuple(rng.choice(MRA_VALUES) for _ in schema), n))
        db[f"R{i}"] = mra.Relation(schema, rows)
    return db


def gen_condition(cfg: FuzzConfig, rng: random.Random, schema, depth: int = 2):
    if depth <= 1 or rng.random() < 0.5:
        attr = rng.choice(schema)
        other = mra.Attr(rng.choice(schema)) if rng.random() < 0.4 else rng.choice(MRA_VALUES)
        return (mra.CondEq if rng.random() < 0.6 else mra.CondNeq)(attr, other)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return mra.CondNot(gen_condition(cfg, rng, schema, depth - 1))
    cls = mra.CondAnd if kind == "and" else mra.CondOr
    return cls(gen_condition(cfg, rng, schema, depth - 1), gen_condition(cfg, rng, schema, depth - 1))


def gen_expr(cfg: FuzzConfig, rng: random.Random, db: dict, depth: int | None = None):
    """Random expression that schema-checks against ``db``."""
    depth = cfg.max_expr_depth if depth is None else depth
    schemas = {k: r.schema for k, r in db.items()}

    def base():
        return mra.BaseRelation(rng.choice(sorted(db)))

    def same_schema(e, d):
        target = set(mra.schema_of(e, schemas))
        for _ in range(4):
            cand = gen(d)
            s = mra.schema_of(cand, schemas)
            if set(s) == target:
                return cand
            if target <= set(s):
                return mra.Project(tuple(sorted(target)), cand)
        if target:
            return mra.Select(gen_condition(cfg, rng, sorted(target)), e)
        return e

    def gen(d):
        if d <= 1 or rng.random() < 0.2:
            return base()
        op = rng.choice(("select", "project", "join", "union", "except"))
        e = gen(d - 1)
        s = mra.schema_of(e, schemas)
        if op == "select":
            return mra.Select(gen_condition(cfg, rng, s), e) if s else e
        if op == "project":
            return mra.Project(tuple(a for a in s if rng.random() < 0.6), e)
        if op == "join":
            return mra.Join(e, gen(d - 1))
        other = same_schema(e, d - 1)
        return (mra.Union_ if op == "union" else mra.Except)(e, other)

    return gen(depth)
