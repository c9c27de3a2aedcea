"""Rewriting programs into four rule shapes over pure atoms.

A pure atom has pairwise distinct variables as arguments. The shapes are:

* projection  ``L <- L1``            with var(L) a subset of var(L1)
* selection   ``L <- L1, EQ``        with var(EQ) within var(L1) and var(L) = var(L1)
* join        ``L <- L1, L2``        with var(L) = var(L1) | var(L2)
* negation    ``L <- L1, not L2``    with var(L2) within var(L1) and var(L) = var(L1)

where EQ is a nonempty list of ``=`` / ``!=`` literals.
"""
from __future__ import annotations

from .analysis import eliminate_equalities, validate
from .program import Atom, Const, Eq, Negated, Neq, Program, Rule, Var

PROJECTION, SELECTION, JOIN, NEGATION = "projection", "selection", "join", "negation"


def _vset(atom: Atom) -> set:
    return set(atom.args)


def rule_shape(rule: Rule) -> str | None:
    """Which of the four shapes ``rule`` has, or ``None``."""
    head, body = rule.head, rule.body
    if not head.is_pure() or not body or not isinstance(body[0], Atom) or not body[0].is_pure():
        return None
    first = body[0]
    if len(body) == 1:
        return PROJECTION if _vset(head) <= _vset(first) else None
    rest = body[1:]
    if len(rest) == 1 and isinstance(rest[0], Atom):
        if rest[0].is_pure() and _vset(head) == _vset(first) | _vset(rest[0]):
            return JOIN
        return None
    if len(rest) == 1 and isinstance(rest[0], Negated):
        neg = rest[0].atom
        if neg.is_pure() and _vset(neg) <= _vset(first) and _vset(head) == _vset(first):
            return NEGATION
        return None
    if all(isinstance(lit, (Eq, Neq)) for lit in rest) and _vset(head) == _vset(first):
        used = {t for lit in rest for t in (lit.left, lit.right) if isinstance(t, Var)}
        ground = any(isinstance(lit.left, Const) and isinstance(lit.right, Const) for lit in rest)
        if used <= _vset(first) and not ground:
            return SELECTION
    return None


def check_normal_form(prog: Program) -> list[str]:
    """Violations of the normal form; empty when ``prog`` is normalized."""
    problems = [f"rule has none of the four shapes: {rule}" for rule in prog.rules if rule_shape(rule) is None]
    mixed = prog.idb_predicates() & prog.edb_predicates()
    problems += [f"predicate {p} has both facts and rules" for p in sorted(mixed)]
    return problems


class _Names:
    def __init__(self, taken):
        self.taken = set(taken)
        self.n = 0

    def __call__(self, stem: str) -> str:
        while True:
            self.n += 1
            name = f"_{stem}{self.n}"
            if name not in self.taken:
                self.taken.add(name)
                return name


class _Normalizer:
    def __init__(self, prog: Program):
        self.prog = prog
        self.pred = _Names(prog.predicates())
        self.rules: list[Rule] = []
        self.seen: set = set()
        self.facts = list(prog.facts)
        self.adom_pred = None
        self.unit_pred = None
        self.purified: dict = {}

    def emit(self, rule: Rule) -> Atom:
        assert rule_shape(rule) is not None, rule
        if rule in self.seen:
            # distinct source rules may coincide after rewriting; rules form a
            # set, so route the copy through a fresh predicate to keep its count
            alias = Atom(self.pred("dup"), rule.head.args)
            self.emit(Rule(alias, rule.body))
            rule = Rule(rule.head, (alias,))
        self.seen.add(rule)
        self.rules.append(rule)
        return rule.head

    def unit(self) -> Atom:
        if self.unit_pred is None:
            self.unit_pred = self.pred("unit")
        return Atom(self.unit_pred, ())

    def adom(self, var: Var) -> Atom:
        if self.adom_pred is None:
            self.adom_pred = self.pred("adom")
        return Atom(self.adom_pred, (var,))

    def purify(self, atom: Atom) -> Atom:
        """A pure atom over the distinct variables of ``atom`` with the same
        answers, introducing a selection and a projection rule if needed."""
        if atom.is_pure():
            return atom
        distinct = atom.vars()
        # shape: each position is a constant or the index of a first occurrence
        shape = tuple(
            a.value if isinstance(a, Const) else distinct.index(a)
            for a in atom.args
        )
        key = (atom.pred, shape)
        if key not in self.purified:
            cols = tuple(Var(f"P{i}") for i in range(atom.arity))
            first = {}
            conds = []
            for i, a in enumerate(atom.args):
                if isinstance(a, Const):
                    conds.append(Eq(cols[i], a))
                elif a in first:
                    conds.append(Eq(cols[i], cols[first[a]]))
                else:
                    first[a] = i
            sel = self.emit(Rule(Atom(self.pred("sel"), cols), (Atom(atom.pred, cols),) + tuple(conds)))
            kept = tuple(cols[first[v]] for v in distinct)
            self.purified[key] = self.emit(Rule(Atom(self.pred("pure"), kept), (sel,))).pred
        return Atom(self.purified[key], tuple(distinct))

    def join_all(self, atoms: list[Atom]) -> Atom:
        current = atoms[0]
        for nxt in atoms[1:]:
            head_vars = tuple(dict.fromkeys(current.args + nxt.args))
            current = self.emit(Rule(Atom(self.pred("join"), head_vars), (current, nxt)))
        return current

    def rule(self, rule: Rule) -> None:
        rule = eliminate_equalities(rule)
        if rule is None:
            return
        positives = [self.purify(a) for a in rule.positives()] or [self.unit()]
        body = self.join_all(positives)
        neqs = rule.comparisons()
        if neqs:
            body = self.emit(Rule(Atom(self.pred("sel"), body.args), (body,) + tuple(neqs)))
        for neg in rule.negatives():
            pure = self.purify(neg)
            body = self.emit(Rule(Atom(self.pred("neg"), body.args), (body, Negated(pure))))
        head = rule.head
        if head.is_pure():
            self.emit(Rule(head, (body,)))
            return
        # impure head: fresh column per constant or repeated variable
        names = {v.name for v in rule.vars()}
        fresh = (Var(f"H{i}") for i in range(10**9) if f"H{i}" not in names)
        cols, conds, seen = [], [], set()
        for a in head.args:
            if isinstance(a, Var) and a not in seen:
                seen.add(a)
                cols.append(a)
            else:
                v = next(fresh)
                cols.append(v)
                conds.append((v, a))
        for v, _ in conds:
            body = self.join_all([body, self.adom(v)])
        body = self.emit(Rule(Atom(self.pred("sel"), body.args), (body,) + tuple(Eq(v, a) for v, a in conds)))
        self.emit(Rule(Atom(head.pred, tuple(cols)), (body,)))

    def run(self) -> Program:
        mixed = self.prog.idb_predicates() & self.prog.edb_predicates()
        moved = {p: self.pred("edb") for p in sorted(mixed)}
        if moved:
            self.facts = [
                (Atom(moved.get(a.pred, a.pred), a.args), n) for a, n in self.facts
            ]
            arities = self.prog.arities()
            for p, q in moved.items():
                cols = tuple(Var(f"X{i}") for i in range(arities[p]))
                self.emit(Rule(Atom(p, cols), (Atom(q, cols),)))
        for rule in self.prog.rules:
            self.rule(rule)
        # keep predicates whose only rules were dropped as empty relations
        arities = self.prog.arities()
        present = {r.head.pred for r in self.rules} | {a.pred for a, _ in self.facts}
        present |= {a.pred for r in self.rules for a in r.positives() + r.negatives()}
        for pred in sorted(set(arities) - present):
            cols = tuple(Var(f"X{i}") for i in range(arities[pred]))
            self.emit(Rule(Atom(pred, cols), (Atom(self.pred("empty"), cols),)))
        if self.unit_pred is not None:
            self.facts.append((Atom(self.unit_pred, ()), 1))
        if self.adom_pred is not None:
            for c in sorted(self.prog.constants()):
                self.facts.append((Atom(self.adom_pred, (Const(c),)), 1))
        return Program(tuple(self.rules), tuple(self.facts))


def normalize(prog: Program) -> Program:
    """Equivalent program (same answers for every predicate of ``prog``)
    whose rules all have one of the four shapes."""
    validate(prog)
    return _Normalizer(prog).run()
