"""Shared test oracles and random generators.

Everything here is deliberately independent of the library's own
algorithms: the query oracle enumerates assignments over the term
universe instead of joining, and the LCS oracle is the classic prefix
table computing lengths only.
"""

from __future__ import annotations

import itertools
import random

from triplediff.compare import ComparisonModel, build_comparison
from triplediff.query import (
    CountProjection,
    Filter,
    NotExists,
    OriginConstraint,
    Query,
    TriplePattern,
    Var,
)
from triplediff.triples import ModelGraph, Statement, Term, iri, literal, serialize_term


# --- LCS oracles -------------------------------------------------------------

def lcs_length_dp(a, b) -> int:
    """Classic quadratic prefix-table LCS length."""
    n = len(b)
    prev = [0] * (n + 1)
    for x in a:
        cur = [0] * (n + 1)
        for j in range(1, n + 1):
            if x == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[n]


def smallest_lcs_positions(a, b) -> list[int]:
    """Exhaustively find the lexicographically smallest position list in
    ``a`` among all maximum-length common subsequences. Tiny inputs only."""
    best: tuple[int, list[int]] | None = None

    def rec(i: int, j: int, positions: list[int]) -> None:
        nonlocal best
        candidate = (len(positions), positions)
        if best is None or (candidate[0] > best[0]
                            or (candidate[0] == best[0] and candidate[1] < best[1])):
            best = (candidate[0], list(positions))
        if i >= len(a):
            return
        rec(i + 1, j, positions)
        for k in range(j, len(b)):
            if b[k] == a[i]:
                positions.append(i)
                rec(i + 1, k + 1, positions)
                positions.pop()

    rec(0, 0, [])
    assert best is not None
    return best[1]


def is_subsequence(sub, seq) -> bool:
    it = iter(seq)
    return all(any(x == y for y in it) for x in sub)


# --- brute-force query oracle ------------------------------------------------

def _positive_vars(clauses) -> list[str]:
    seen: list[str] = []
    for clause in clauses:
        if isinstance(clause, TriplePattern):
            for term in (clause.subject, clause.predicate, clause.obj):
                if isinstance(term, Var) and term.name not in seen:
                    seen.append(term.name)
    return seen


def brute_force_evaluate(comparison: ComparisonModel, query: Query):
    """Evaluate by enumerating every assignment over the term universe.

    Returns (columns, sorted rows) in the same shape as the engine's
    BindingTable, or ("count", n) for COUNT projections.
    """
    entries = comparison.entries()
    universe = sorted(
        {t for stmt, _ in entries
         for t in (stmt.subject, stmt.predicate, stmt.obj)},
        key=Term.sort_key,
    )

    def pattern_holds(pattern: TriplePattern, env) -> bool:
        def resolve(term):
            return env[term.name] if isinstance(term, Var) else term

        s, p, o = resolve(pattern.subject), resolve(pattern.predicate), resolve(pattern.obj)
        for stmt, origins in entries:
            if stmt.subject == s and stmt.predicate == p and stmt.obj == o:
                return all(
                    (c.label in origins) == c.required for c in pattern.origins
                )
        return False

    def filter_holds(flt: Filter, env) -> bool:
        def resolve(term):
            return env[term.name] if isinstance(term, Var) else term

        a = resolve(flt.left).value
        b = resolve(flt.right).value
        return {
            "=": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b,
        }[flt.op]

    def holds(clauses, env, visible: set[str]) -> bool:
        # Walk positionally so a NOT EXISTS only sees variables bound by
        # earlier clauses, exactly like the engine.
        visible = set(visible)
        for clause in clauses:
            if isinstance(clause, TriplePattern):
                if not pattern_holds(clause, env):
                    return False
                for term in (clause.subject, clause.predicate, clause.obj):
                    if isinstance(term, Var):
                        visible.add(term.name)
            elif isinstance(clause, Filter):
                if not filter_holds(clause, env):
                    return False
            else:
                restricted = {name: env[name] for name in visible}
                if exists(clause.clauses, restricted):
                    return False
        return True

    def exists(clauses, env) -> bool:
        fresh = [v for v in _positive_vars(clauses) if v not in env]
        for combo in itertools.product(universe, repeat=len(fresh)):
            inner = dict(env)
            inner.update(zip(fresh, combo))
            if holds(clauses, inner, set(env)):
                return True
        return False

    outer = _positive_vars(query.clauses)
    satisfying = []
    for combo in itertools.product(universe, repeat=len(outer)):
        env = dict(zip(outer, combo))
        if holds(query.clauses, env, set()):
            satisfying.append(env)

    if isinstance(query.projection, CountProjection):
        name = query.projection.var.name
        if query.projection.distinct:
            return ("count", len({env[name] for env in satisfying}))
        return ("count", len(satisfying))

    names = tuple(v.name for v in query.projection)
    rows = [tuple(env[name] for name in names) for env in satisfying]
    if query.distinct:
        rows = list(set(rows))
    rows.sort(key=lambda row: tuple(serialize_term(t) for t in row))
    return (names, rows)


# --- random model and query generators ---------------------------------------

def random_comparison(rnd: random.Random, max_statements: int = 60):
    """A small comparison over a compact term universe."""
    n_labels = rnd.choice((2, 2, 3))
    labels = ["base", "left", "right"][:n_labels]
    subjects = [iri(f"e:s{i}") for i in range(rnd.randint(2, 5))]
    predicates = [iri(p) for p in
                  rnd.sample(["m:type", "a:Name", "a:Note", "r:ref", "p:x"],
                             rnd.randint(2, 4))]
    objects = subjects[:2] + [literal(v) for v in
                              rnd.sample(["x", "y", "z", "Design", ""], 3)]
    graphs = []
    for label in labels:
        count = rnd.randint(1, max_statements // n_labels)
        statements = set()
        for _ in range(count):
            statements.add(Statement(
                rnd.choice(subjects), rnd.choice(predicates), rnd.choice(objects)))
        graphs.append((label, ModelGraph(statements)))
    return build_comparison(graphs)


def random_query(rnd: random.Random, comparison: ComparisonModel) -> Query:
    labels = list(comparison.labels)
    entries = comparison.entries()
    subjects = sorted({s.subject for s, _ in entries}, key=Term.sort_key)
    predicates = sorted({s.predicate for s, _ in entries}, key=Term.sort_key)
    objects = sorted({s.obj for s, _ in entries}, key=Term.sort_key)
    var_pool = ["a", "b", "c"]

    def gen_term(position: str, force_var: bool = False):
        if force_var or rnd.random() < 0.5:
            return Var(rnd.choice(var_pool))
        if position == "subject":
            return rnd.choice(subjects)
        if position == "predicate":
            return rnd.choice(predicates)
        return rnd.choice(objects)

    def gen_origins():
        if rnd.random() < 0.5:
            return ()
        return tuple(
            OriginConstraint(rnd.choice(labels), rnd.random() < 0.7)
            for _ in range(rnd.randint(1, 2))
        )

    def gen_pattern(force_var: bool = False) -> TriplePattern:
        return TriplePattern(
            gen_term("subject", force_var), gen_term("predicate"),
            gen_term("object"), gen_origins())

    def gen_clauses(depth: int, bound: set[str], ensure_pattern: bool):
        clauses = []
        count = rnd.randint(1, 3)
        for k in range(count):
            roll = rnd.random()
            if (ensure_pattern and k == 0) or roll < 0.55 or not bound:
                pattern = gen_pattern(force_var=(ensure_pattern and k == 0))
                clauses.append(pattern)
                bound |= {t.name for t in
                          (pattern.subject, pattern.predicate, pattern.obj)
                          if isinstance(t, Var)}
            elif roll < 0.75:
                left = Var(rnd.choice(sorted(bound)))
                right = (Var(rnd.choice(sorted(bound)))
                         if rnd.random() < 0.3 and bound
                         else literal(rnd.choice(["x", "y", "Design", "a:", "e:"])))
                op = rnd.choice(["=", "!=", "<", "<=", ">", ">="])
                clauses.append(Filter(left, op, right))
            elif depth > 0:
                clauses.append(NotExists(
                    tuple(gen_clauses(depth - 1, set(bound), False))))
            else:
                clauses.append(gen_pattern())
        return clauses

    bound: set[str] = set()
    clauses = tuple(gen_clauses(2, bound, ensure_pattern=True))
    positive = _positive_vars(clauses)
    if rnd.random() < 0.25:
        projection = CountProjection(Var(rnd.choice(positive)), rnd.random() < 0.5)
    else:
        k = rnd.randint(1, min(2, len(positive)))
        projection = tuple(Var(name) for name in rnd.sample(positive, k))
    return Query(rnd.random() < 0.5, projection, clauses)
