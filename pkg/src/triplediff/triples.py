"""Core triple data model and the canonical ``.nt3`` text format.

A term is either an IRI or a plain string literal. A statement is a
(subject, predicate, object) triple compared by value. A ModelGraph is a
duplicate-free set of statements with a bytewise canonical order, so two
equal graphs always serialize to identical bytes.

File format (``.nt3``): one statement per line, UTF-8, LF line endings,
``<IRI> <IRI> OBJ`` with single spaces, where OBJ is ``<IRI>`` or a
double-quoted literal. Literal escapes: ``\\\\``, ``\\"``, ``\\n``,
``\\t``. Lines are sorted and the file ends with a trailing LF unless
empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

IRI = "iri"
LITERAL = "literal"

# Characters an IRI may never contain. The parser and the factories below
# enforce the same set.
IRI_FORBIDDEN = frozenset(' <>"\n\t')

_ESCAPE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}
_UNESCAPE = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


class ParseError(ValueError):
    """Raised for malformed canonical triple text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class Term:
    kind: str
    value: str

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    def sort_key(self) -> tuple[int, str]:
        # IRIs sort before literals, then bytewise on the value. Python
        # string comparison is code-point order, which equals UTF-8 byte
        # order, so no encoding is needed here.
        return (0 if self.kind == IRI else 1, self.value)


def iri(value: str) -> Term:
    """Build an IRI term, rejecting the forbidden characters."""
    if not value:
        raise ValueError("IRI value must be non-empty")
    if IRI_FORBIDDEN.intersection(value):
        raise ValueError(f"IRI value contains a forbidden character: {value!r}")
    return Term(IRI, value)


def literal(value: str) -> Term:
    """Build a literal term holding arbitrary text, including empty."""
    return Term(LITERAL, value)


@dataclass(frozen=True, slots=True)
class Statement:
    subject: Term
    predicate: Term
    obj: Term

    def __post_init__(self):
        if not self.subject.is_iri:
            raise ValueError("statement subject must be an IRI")
        if not self.predicate.is_iri:
            raise ValueError("statement predicate must be an IRI")

    def sort_key(self) -> tuple[str, str, int, str]:
        okind, ovalue = self.obj.sort_key()
        return (self.subject.value, self.predicate.value, okind, ovalue)


def statement(subject: str, predicate: str, obj: Term) -> Statement:
    """Convenience constructor taking IRI strings for subject/predicate."""
    return Statement(iri(subject), iri(predicate), obj)


def statement_order(a: Statement, b: Statement) -> int:
    """Total order over statements: -1, 0 or 1.

    Compares subject, then predicate, then object kind (IRI before
    literal), then object value, all bytewise.
    """
    ka, kb = a.sort_key(), b.sort_key()
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


class ModelGraph:
    """An immutable, duplicate-free set of statements.

    Iteration follows the canonical statement order, so any two equal
    graphs iterate and serialize identically. Equality compares the
    statement sets only; the optional label is descriptive metadata.
    """

    __slots__ = ("_statements", "label", "_sorted")

    def __init__(self, statements: Iterable[Statement] = (), label: str | None = None):
        self._statements = frozenset(statements)
        self.label = label
        self._sorted: list[Statement] | None = None

    @property
    def statements(self) -> frozenset[Statement]:
        return self._statements

    def sorted_statements(self) -> list[Statement]:
        if self._sorted is None:
            self._sorted = sorted(self._statements, key=Statement.sort_key)
        return self._sorted

    def __iter__(self) -> Iterator[Statement]:
        return iter(self.sorted_statements())

    def __len__(self) -> int:
        return len(self._statements)

    def __contains__(self, item: object) -> bool:
        return item in self._statements

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelGraph):
            return NotImplemented
        return self._statements == other._statements

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"<ModelGraph{name} ({len(self)} statements)>"


def escape_literal(value: str) -> str:
    """Apply the literal escapes; used for serialization and display."""
    return "".join(_ESCAPE.get(c, c) for c in value)


def serialize_term(term: Term) -> str:
    if term.kind == IRI:
        return f"<{term.value}>"
    return f'"{escape_literal(term.value)}"'


def serialize_statement(stmt: Statement) -> str:
    return (
        f"<{stmt.subject.value}> <{stmt.predicate.value}> {serialize_term(stmt.obj)}"
    )


def serialize_graph(graph: ModelGraph) -> str:
    """Canonical text of a graph: sorted lines, trailing LF unless empty."""
    if not graph.statements:
        return ""
    return "".join(serialize_statement(s) + "\n" for s in graph)


def _scan_iri(line: str, pos: int, lineno: int) -> tuple[Term, int]:
    # pos points at '<'
    end = line.find(">", pos + 1)
    if end < 0:
        raise ParseError("unterminated IRI (missing '>')", lineno)
    value = line[pos + 1 : end]
    try:
        term = iri(value)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from exc
    return term, end + 1


def _scan_literal(line: str, pos: int, lineno: int) -> tuple[Term, int]:
    # pos points at the opening quote
    out: list[str] = []
    i = pos + 1
    n = len(line)
    while i < n:
        c = line[i]
        if c == '"':
            return literal("".join(out)), i + 1
        if c == "\\":
            if i + 1 >= n:
                raise ParseError("dangling escape at end of line", lineno)
            replacement = _UNESCAPE.get(line[i + 1])
            if replacement is None:
                raise ParseError(f"bad escape '\\{line[i + 1]}'", lineno)
            out.append(replacement)
            i += 2
            continue
        out.append(c)
        i += 1
    raise ParseError("unterminated literal (missing closing quote)", lineno)


def scan_term(line: str, pos: int, lineno: int) -> tuple[Term, int]:
    """Scan one ``<IRI>`` or quoted literal starting at ``pos``."""
    if pos >= len(line):
        raise ParseError("unexpected end of line, expected a term", lineno)
    c = line[pos]
    if c == "<":
        return _scan_iri(line, pos, lineno)
    if c == '"':
        return _scan_literal(line, pos, lineno)
    raise ParseError(f"expected '<' or '\"', found {c!r}", lineno)


def parse_statement_line(line: str, lineno: int = 1) -> Statement:
    """Parse a single canonical statement line (without the newline)."""
    if not line:
        raise ParseError("empty line", lineno)
    subject, pos = scan_term(line, 0, lineno)
    if not subject.is_iri:
        raise ParseError("subject must be an IRI", lineno)
    if pos >= len(line) or line[pos] != " ":
        raise ParseError("expected single space after subject", lineno)
    predicate, pos = scan_term(line, pos + 1, lineno)
    if not predicate.is_iri:
        raise ParseError("predicate must be an IRI", lineno)
    if pos >= len(line) or line[pos] != " ":
        raise ParseError("expected single space after predicate, missing object", lineno)
    obj, pos = scan_term(line, pos + 1, lineno)
    if pos != len(line):
        raise ParseError(f"trailing content after object: {line[pos:]!r}", lineno)
    return Statement(subject, predicate, obj)


def parse_graph(data: str | bytes, label: str | None = None) -> ModelGraph:
    """Parse canonical triple text into a graph.

    Input line order is irrelevant and duplicate lines collapse into a
    single statement. Raises ParseError with a 1-based line number for
    malformed input.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    statements = set()
    if data:
        body = data[:-1] if data.endswith("\n") else data
        if body:
            for lineno, line in enumerate(body.split("\n"), start=1):
                statements.add(parse_statement_line(line, lineno))
    return ModelGraph(statements, label=label)
