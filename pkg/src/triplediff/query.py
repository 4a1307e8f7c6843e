"""DeltaQuery: a small pattern language over comparison models.

Grammar (``#`` starts a line comment)::

    query     := "SELECT" "DISTINCT"? (var+ | "COUNT" "(" "DISTINCT"? var ")")
                 "WHERE" "{" clause* "}"
    clause    := triple | filter | notexists
    triple    := term term term origins? "."
    origins   := "@[" ("+"|"-") label ("," ("+"|"-") label)* "]"
    filter    := "FILTER" operand cmp operand
    notexists := "NOT" "EXISTS" "{" clause* "}"

Terms are variables (``?name``), IRIs (``<...>``) or double-quoted
literals with the ``.nt3`` escapes. Filter operands are variables or
literals; ``cmp`` is one of ``= != < <= > >=`` (the Unicode forms
``≠ ≤ ≥`` are also accepted). Labels use ``[A-Za-z0-9_-]``.

Semantics: clauses join left to right. A triple pattern matches an entry
when its terms unify with the current bindings and every ``+label`` /
``-label`` constraint holds against the entry's origin set. FILTER
compares term values bytewise (the IRI text or the literal text; the
term kind is ignored) and must only reference variables bound by an
earlier pattern. NOT EXISTS keeps a row when its body has no solution;
variables first bound inside do not escape. Projected variables must
occur in a positive top-level pattern. Result rows are ordered
lexicographically by the serialized terms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Union

from .compare import ComparisonModel, UnknownLabelError
from .triples import IRI, LITERAL, Term, iri, literal, serialize_term

_CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
_CMP_UNICODE = {"≠": "!=", "≤": "<=", "≥": ">="}
_LABEL_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-"
)
_VAR_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_"
)
_UNESCAPE = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class QuerySemanticError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Var, Term]


@dataclass(frozen=True)
class OriginConstraint:
    label: str
    required: bool  # True for +label, False for -label


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    obj: PatternTerm
    origins: tuple[OriginConstraint, ...] = ()


@dataclass(frozen=True)
class Filter:
    left: PatternTerm  # Var or literal Term
    op: str
    right: PatternTerm


@dataclass(frozen=True)
class NotExists:
    clauses: tuple["Clause", ...]


Clause = Union[TriplePattern, Filter, NotExists]


@dataclass(frozen=True)
class CountProjection:
    var: Var
    distinct: bool


@dataclass(frozen=True)
class Query:
    distinct: bool
    projection: Union[tuple[Var, ...], CountProjection]
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class BindingTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[Term, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [
                [{"kind": t.kind, "value": t.value} for t in row]
                for row in self.rows
            ],
        }

    def format_table(self) -> str:
        from .render import format_aligned_table

        header = [f"?{c}" if c != "count" else "count" for c in self.columns]
        body = [[_display(t) for t in row] for row in self.rows]
        return format_aligned_table(header, body)

    def format_csv(self) -> str:
        import csv
        import io

        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_display(t) for t in row])
        return out.getvalue()


def _display(term: Term) -> str:
    from .triples import escape_literal

    if term.kind == IRI:
        return f"<{term.value}>"
    return escape_literal(term.value)


# --- lexer -----------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # word | var | iri | literal | punct | cmp | eof
    text: str
    line: int
    column: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def error(msg: str) -> QuerySyntaxError:
        return QuerySyntaxError(msg, line, col)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start_line, start_col = line, col
        if c == "?":
            j = i + 1
            while j < n and text[j] in _VAR_CHARS:
                j += 1
            if j == i + 1:
                raise error("empty variable name after '?'")
            tokens.append(_Token("var", text[i + 1 : j], start_line, start_col))
            advance(j - i)
            continue
        if c == "<":
            # An IRI runs to '>' with no whitespace or quote; otherwise this
            # is the comparison operator '<' or '<='.
            j = i + 1
            while j < n and text[j] not in ' \t\n">':
                j += 1
            if j < n and text[j] == ">":
                value = text[i + 1 : j]
                try:
                    iri(value)
                except ValueError as exc:
                    raise error(str(exc)) from exc
                tokens.append(_Token("iri", value, start_line, start_col))
                advance(j + 1 - i)
                continue
            if i + 1 < n and text[i + 1] == "=":
                tokens.append(_Token("cmp", "<=", start_line, start_col))
                advance(2)
            else:
                tokens.append(_Token("cmp", "<", start_line, start_col))
                advance(1)
            continue
        if c == '"':
            out: list[str] = []
            j = i + 1
            while j < n:
                ch = text[j]
                if ch == '"':
                    break
                if ch == "\n":
                    raise error("unterminated literal (newline before closing quote)")
                if ch == "\\":
                    if j + 1 >= n:
                        raise error("dangling escape in literal")
                    repl = _UNESCAPE.get(text[j + 1])
                    if repl is None:
                        raise error(f"bad escape '\\{text[j + 1]}' in literal")
                    out.append(repl)
                    j += 2
                    continue
                out.append(ch)
                j += 1
            if j >= n:
                raise error("unterminated literal (missing closing quote)")
            tokens.append(_Token("literal", "".join(out), start_line, start_col))
            advance(j + 1 - i)
            continue
        if c in _CMP_UNICODE:
            tokens.append(_Token("cmp", _CMP_UNICODE[c], start_line, start_col))
            advance(1)
            continue
        if c == "!":
            if i + 1 < n and text[i + 1] == "=":
                tokens.append(_Token("cmp", "!=", start_line, start_col))
                advance(2)
                continue
            raise error("expected '=' after '!'")
        if c == "=":
            tokens.append(_Token("cmp", "=", start_line, start_col))
            advance(1)
            continue
        if c == ">":
            if i + 1 < n and text[i + 1] == "=":
                tokens.append(_Token("cmp", ">=", start_line, start_col))
                advance(2)
            else:
                tokens.append(_Token("cmp", ">", start_line, start_col))
                advance(1)
            continue
        if c == "@":
            if i + 1 < n and text[i + 1] == "[":
                tokens.append(_Token("punct", "@[", start_line, start_col))
                advance(2)
                continue
            raise error("expected '[' after '@'")
        if c in "{}().,+-]":
            tokens.append(_Token("punct", c, start_line, start_col))
            advance(1)
            continue
        if c in _LABEL_CHARS:
            j = i
            while j < n and text[j] in _LABEL_CHARS:
                j += 1
            tokens.append(_Token("word", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        raise error(f"unexpected character {c!r}")
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, msg: str, tok: _Token | None = None) -> QuerySyntaxError:
        tok = tok or self.peek()
        return QuerySyntaxError(msg, tok.line, tok.column)

    def expect_word(self, word: str) -> None:
        tok = self.next()
        if tok.kind != "word" or tok.text != word:
            raise self.error(f"expected {word!r}", tok)

    def expect_punct(self, punct: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.text != punct:
            raise self.error(f"expected {punct!r}", tok)

    def parse(self) -> Query:
        self.expect_word("SELECT")
        distinct = False
        if self.peek().kind == "word" and self.peek().text == "DISTINCT":
            self.next()
            distinct = True
        projection = self.parse_projection()
        self.expect_word("WHERE")
        self.expect_punct("{")
        clauses = self.parse_clauses()
        self.expect_punct("}")
        tok = self.next()
        if tok.kind != "eof":
            raise self.error("unexpected content after query", tok)
        return Query(distinct, projection, clauses)

    def parse_projection(self) -> Union[tuple[Var, ...], CountProjection]:
        tok = self.peek()
        if tok.kind == "word" and tok.text == "COUNT":
            self.next()
            self.expect_punct("(")
            inner_distinct = False
            if self.peek().kind == "word" and self.peek().text == "DISTINCT":
                self.next()
                inner_distinct = True
            var_tok = self.next()
            if var_tok.kind != "var":
                raise self.error("expected a variable inside COUNT(...)", var_tok)
            self.expect_punct(")")
            return CountProjection(Var(var_tok.text), inner_distinct)
        variables: list[Var] = []
        while self.peek().kind == "var":
            variables.append(Var(self.next().text))
        if not variables:
            raise self.error("expected projection variables or COUNT(...)")
        return tuple(variables)

    def parse_clauses(self) -> tuple[Clause, ...]:
        clauses: list[Clause] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "}":
                return tuple(clauses)
            if tok.kind == "word" and tok.text == "FILTER":
                clauses.append(self.parse_filter())
            elif tok.kind == "word" and tok.text == "NOT":
                clauses.append(self.parse_notexists())
            elif tok.kind in ("var", "iri", "literal"):
                clauses.append(self.parse_triple())
            else:
                raise self.error("expected a triple pattern, FILTER, NOT EXISTS or '}'")

    def parse_term(self, position: str) -> PatternTerm:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text)
        if tok.kind == "iri":
            return iri(tok.text)
        if tok.kind == "literal":
            if position in ("subject", "predicate"):
                raise self.error(f"a literal cannot appear as {position}", tok)
            return literal(tok.text)
        raise self.error(f"expected a term for the {position}", tok)

    def parse_triple(self) -> TriplePattern:
        subject = self.parse_term("subject")
        predicate = self.parse_term("predicate")
        obj = self.parse_term("object")
        origins: tuple[OriginConstraint, ...] = ()
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "@[":
            origins = self.parse_origins()
        self.expect_punct(".")
        return TriplePattern(subject, predicate, obj, origins)

    def parse_origins(self) -> tuple[OriginConstraint, ...]:
        self.expect_punct("@[")
        constraints: list[OriginConstraint] = []
        while True:
            sign = self.next()
            if sign.kind != "punct" or sign.text not in "+-":
                raise self.error("expected '+' or '-' before origin label", sign)
            label_tok = self.next()
            if label_tok.kind != "word":
                raise self.error("expected an origin label", label_tok)
            constraints.append(OriginConstraint(label_tok.text, sign.text == "+"))
            sep = self.next()
            if sep.kind == "punct" and sep.text == ",":
                continue
            if sep.kind == "punct" and sep.text == "]":
                return tuple(constraints)
            raise self.error("expected ',' or ']' in origin constraints", sep)

    def parse_filter(self) -> Filter:
        self.expect_word("FILTER")
        left = self.parse_filter_operand()
        op_tok = self.next()
        if op_tok.kind != "cmp":
            raise self.error("expected a comparison operator", op_tok)
        right = self.parse_filter_operand()
        return Filter(left, op_tok.text, right)

    def parse_filter_operand(self) -> PatternTerm:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text)
        if tok.kind == "literal":
            return literal(tok.text)
        raise self.error("filter operands must be variables or literals", tok)

    def parse_notexists(self) -> NotExists:
        self.expect_word("NOT")
        self.expect_word("EXISTS")
        self.expect_punct("{")
        clauses = self.parse_clauses()
        self.expect_punct("}")
        return NotExists(clauses)


def _pattern_vars(pattern: TriplePattern) -> set[str]:
    return {
        t.name
        for t in (pattern.subject, pattern.predicate, pattern.obj)
        if isinstance(t, Var)
    }


def _validate_clauses(clauses: tuple[Clause, ...], bound: set[str]) -> set[str]:
    # Walk left to right; filters may only use variables already bound.
    bound = set(bound)
    for clause in clauses:
        if isinstance(clause, TriplePattern):
            bound |= _pattern_vars(clause)
        elif isinstance(clause, Filter):
            for operand in (clause.left, clause.right):
                if isinstance(operand, Var) and operand.name not in bound:
                    raise QuerySemanticError(
                        f"filter references ?{operand.name} before any "
                        f"pattern binds it"
                    )
        else:
            _validate_clauses(clause.clauses, bound)
    return bound


def _validate(query: Query) -> None:
    positive: set[str] = set()
    for clause in query.clauses:
        if isinstance(clause, TriplePattern):
            positive |= _pattern_vars(clause)
    if isinstance(query.projection, CountProjection):
        projected = [query.projection.var]
    else:
        projected = list(query.projection)
    for var in projected:
        if var.name not in positive:
            raise QuerySemanticError(
                f"projected variable ?{var.name} does not occur in any "
                f"positive triple pattern"
            )
    _validate_clauses(query.clauses, set())


def parse_query(text: str) -> Query:
    """Parse query text, raising QuerySyntaxError / QuerySemanticError."""
    query = _Parser(_lex(text)).parse()
    _validate(query)
    return query


def query_labels(query: Query) -> set[str]:
    """All origin labels referenced anywhere in the query."""
    labels: set[str] = set()

    def walk(clauses: tuple[Clause, ...]) -> None:
        for clause in clauses:
            if isinstance(clause, TriplePattern):
                labels.update(c.label for c in clause.origins)
            elif isinstance(clause, NotExists):
                walk(clause.clauses)

    walk(query.clauses)
    return labels


def relabel_query(query: Query, mapping: dict[str, str]) -> Query:
    """Rewrite origin labels through the mapping (unmapped labels kept)."""

    def walk_clause(clause: Clause) -> Clause:
        if isinstance(clause, TriplePattern):
            origins = tuple(
                replace(c, label=mapping.get(c.label, c.label))
                for c in clause.origins
            )
            return replace(clause, origins=origins)
        if isinstance(clause, NotExists):
            return NotExists(tuple(walk_clause(c) for c in clause.clauses))
        return clause

    return replace(query, clauses=tuple(walk_clause(c) for c in query.clauses))


# --- evaluator --------------------------------------------------------------

def _resolve(term: PatternTerm, row: dict[str, Term]) -> Term | None:
    if isinstance(term, Var):
        return row.get(term.name)
    return term


def _filter_holds(flt: Filter, row: dict[str, Term]) -> bool:
    left = _resolve(flt.left, row)
    right = _resolve(flt.right, row)
    assert left is not None and right is not None  # guaranteed by validation
    a, b = left.value, right.value
    if flt.op == "=":
        return a == b
    if flt.op == "!=":
        return a != b
    if flt.op == "<":
        return a < b
    if flt.op == "<=":
        return a <= b
    if flt.op == ">":
        return a > b
    return a >= b


class _Engine:
    def __init__(self, comparison: ComparisonModel):
        self.entries = comparison.entries()
        self.index_p = comparison.index_by_predicate()
        self.index_sp = comparison.index_by_subject_predicate()

    def _candidates(self, subject: Term | None, predicate: Term | None) -> Iterator[int]:
        if predicate is not None and subject is not None:
            return iter(self.index_sp.get((subject.value, predicate.value), ()))
        if predicate is not None:
            return iter(self.index_p.get(predicate.value, ()))
        return iter(range(len(self.entries)))

    def solve(self, clauses: tuple[Clause, ...],
              row: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if not clauses:
            yield row
            return
        head = clauses[0]
        rest = clauses[1:]
        if isinstance(head, TriplePattern):
            subject = _resolve(head.subject, row)
            predicate = _resolve(head.predicate, row)
            obj = _resolve(head.obj, row)
            if subject is not None and not subject.is_iri:
                return
            if predicate is not None and not predicate.is_iri:
                return
            for pos in self._candidates(subject, predicate):
                stmt, origins = self.entries[pos]
                if subject is not None and stmt.subject != subject:
                    continue
                if predicate is not None and stmt.predicate != predicate:
                    continue
                if obj is not None and stmt.obj != obj:
                    continue
                ok = True
                for constraint in head.origins:
                    present = constraint.label in origins
                    if present != constraint.required:
                        ok = False
                        break
                if not ok:
                    continue
                # Bind position by position; a variable repeated within the
                # pattern must unify with its first binding.
                extended = dict(row)
                for pattern_term, value in ((head.subject, stmt.subject),
                                            (head.predicate, stmt.predicate),
                                            (head.obj, stmt.obj)):
                    if isinstance(pattern_term, Var):
                        bound = extended.get(pattern_term.name)
                        if bound is None:
                            extended[pattern_term.name] = value
                        elif bound != value:
                            ok = False
                            break
                if not ok:
                    continue
                yield from self.solve(rest, extended)
            return
        if isinstance(head, Filter):
            if _filter_holds(head, row):
                yield from self.solve(rest, row)
            return
        # NOT EXISTS
        if next(self.solve(head.clauses, row), None) is None:
            yield from self.solve(rest, row)


def evaluate(comparison: ComparisonModel, query: Query) -> BindingTable:
    """Evaluate a query against a comparison model.

    Raises UnknownLabelError when the query constrains a label the model
    does not declare.
    """
    unknown = query_labels(query) - set(comparison.labels)
    if unknown:
        raise UnknownLabelError(
            f"query references unknown model labels: {', '.join(sorted(unknown))}"
        )
    engine = _Engine(comparison)
    solutions = engine.solve(query.clauses, {})

    if isinstance(query.projection, CountProjection):
        name = query.projection.var.name
        if query.projection.distinct:
            count = len({row[name] for row in solutions})
        else:
            count = sum(1 for _ in solutions)
        return BindingTable(("count",), ((literal(str(count)),),))

    names = tuple(var.name for var in query.projection)
    rows = [tuple(row[name] for name in names) for row in solutions]
    if query.distinct:
        rows = list(set(rows))
    rows.sort(key=lambda row: tuple(serialize_term(t) for t in row))
    return BindingTable(names, tuple(rows))
