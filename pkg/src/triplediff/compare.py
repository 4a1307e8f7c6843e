"""Origin-tagged comparison models built from two or more labeled graphs.

A comparison model holds the union of the input statement sets; every
statement carries the set of model labels it belongs to. Projecting a
label back out reconstructs the original input graph exactly.

File format (``.ntc``): one entry per line, the canonical statement text
followed by `` @ `` and the comma-separated origin labels sorted
bytewise, e.g.::

    <e:a1> <a:Name> "Design" @ base,tail

Lines follow the canonical statement order. A label that marks no
statement at all (an empty input graph) is not representable in this
format; in-memory models keep such labels.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .triples import (
    ModelGraph,
    ParseError,
    Statement,
    parse_statement_line,
    serialize_statement,
    iri,
    literal,
)

# Characters that would collide with the .ntc line syntax or the CLI
# label=path argument form.
_LABEL_FORBIDDEN = frozenset(" \t\n,@=")

REIFIED_SUBJECT = "m:subject"
REIFIED_PREDICATE = "m:predicate"
REIFIED_OBJECT = "m:object"
REIFIED_IN_MODEL = "m:inModel"


class ComparisonError(ValueError):
    """Invalid comparison construction or access."""


class DuplicateLabelError(ComparisonError):
    pass


class UnknownLabelError(ComparisonError):
    pass


def _check_label(label: str) -> str:
    if not label:
        raise ComparisonError("model label must be non-empty")
    if _LABEL_FORBIDDEN.intersection(label):
        raise ComparisonError(
            f"model label {label!r} contains whitespace or one of ',@='"
        )
    return label


class ComparisonModel:
    """Union of labeled statement sets, each entry tagged with its origins."""

    __slots__ = ("_labels", "_entries", "_sorted", "_index_p", "_index_sp")

    def __init__(self, labels: Sequence[str],
                 entries: dict[Statement, frozenset[str]]):
        self._labels = tuple(labels)
        self._entries = entries
        self._sorted: list[tuple[Statement, frozenset[str]]] | None = None
        self._index_p: dict[str, list[int]] | None = None
        self._index_sp: dict[tuple[str, str], list[int]] | None = None

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def __len__(self) -> int:
        return len(self._entries)

    def origin(self, stmt: Statement) -> frozenset[str] | None:
        return self._entries.get(stmt)

    def entries(self) -> list[tuple[Statement, frozenset[str]]]:
        """Entries in canonical statement order (cached)."""
        if self._sorted is None:
            self._sorted = sorted(
                self._entries.items(), key=lambda item: item[0].sort_key()
            )
        return self._sorted

    # Pattern lookup indexes used by the query evaluator.

    def index_by_predicate(self) -> dict[str, list[int]]:
        if self._index_p is None:
            index: dict[str, list[int]] = {}
            for pos, (stmt, _) in enumerate(self.entries()):
                index.setdefault(stmt.predicate.value, []).append(pos)
            self._index_p = index
        return self._index_p

    def index_by_subject_predicate(self) -> dict[tuple[str, str], list[int]]:
        if self._index_sp is None:
            index: dict[tuple[str, str], list[int]] = {}
            for pos, (stmt, _) in enumerate(self.entries()):
                key = (stmt.subject.value, stmt.predicate.value)
                index.setdefault(key, []).append(pos)
            self._index_sp = index
        return self._index_sp

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComparisonModel):
            return NotImplemented
        return self._labels == other._labels and self._entries == other._entries

    def __repr__(self) -> str:
        return f"<ComparisonModel labels={self._labels} ({len(self)} entries)>"


def build_comparison(inputs: Sequence[tuple[str, ModelGraph]]) -> ComparisonModel:
    """Union the input graphs into a comparison model.

    Requires at least two inputs with distinct, non-empty labels.
    """
    if len(inputs) < 2:
        raise ComparisonError("a comparison needs at least two input models")
    labels: list[str] = []
    for label, _ in inputs:
        _check_label(label)
        if label in labels:
            raise DuplicateLabelError(f"duplicate model label {label!r}")
        labels.append(label)

    entries: dict[Statement, frozenset[str]] = {}
    for label, graph in inputs:
        for stmt in graph.statements:
            existing = entries.get(stmt)
            if existing is None:
                entries[stmt] = frozenset((label,))
            else:
                entries[stmt] = existing | {label}
    return ComparisonModel(labels, entries)


def project_origin(comparison: ComparisonModel, label: str) -> ModelGraph:
    """Recover the statements belonging to one origin label."""
    if label not in comparison.labels:
        raise UnknownLabelError(f"unknown model label {label!r}")
    statements = [
        stmt for stmt, origins in comparison.entries() if label in origins
    ]
    return ModelGraph(statements, label=label)


def export_reified(comparison: ComparisonModel) -> ModelGraph:
    """Express the comparison itself as a plain graph.

    Entry k (canonical order) with statement (s, p, o) becomes a node
    ``x:stmt<k>`` carrying m:subject, m:predicate and m:object
    statements plus one m:inModel per origin label. The index is
    zero-padded to a fixed width so node names sort like the entries.
    """
    entries = comparison.entries()
    width = max(6, len(str(max(len(entries) - 1, 0))))
    statements: list[Statement] = []
    for k, (stmt, origins) in enumerate(entries):
        node = iri(f"x:stmt{k:0{width}d}")
        statements.append(Statement(node, iri(REIFIED_SUBJECT), stmt.subject))
        statements.append(Statement(node, iri(REIFIED_PREDICATE), stmt.predicate))
        statements.append(Statement(node, iri(REIFIED_OBJECT), stmt.obj))
        for label in sorted(origins):
            statements.append(Statement(node, iri(REIFIED_IN_MODEL), literal(label)))
    return ModelGraph(statements)


def serialize_comparison(comparison: ComparisonModel) -> str:
    """Canonical ``.ntc`` text of a comparison model."""
    lines = []
    for stmt, origins in comparison.entries():
        labels = ",".join(sorted(origins))
        lines.append(f"{serialize_statement(stmt)} @ {labels}\n")
    return "".join(lines)


def _parse_comparison_line(line: str, lineno: int) -> tuple[Statement, frozenset[str]]:
    marker = " @ "
    # The statement part cannot contain a bare " @ " outside a literal, and
    # literals escape nothing that hides one, so scan from the right of the
    # parsed statement instead: parse terms first.
    from .triples import scan_term

    subject, pos = scan_term(line, 0, lineno)
    if pos >= len(line) or line[pos] != " ":
        raise ParseError("expected single space after subject", lineno)
    predicate, pos = scan_term(line, pos + 1, lineno)
    if pos >= len(line) or line[pos] != " ":
        raise ParseError("expected single space after predicate", lineno)
    obj, pos = scan_term(line, pos + 1, lineno)
    if line[pos : pos + len(marker)] != marker:
        raise ParseError("expected ' @ ' and origin labels after statement", lineno)
    label_part = line[pos + len(marker):]
    if not label_part:
        raise ParseError("empty origin label list", lineno)
    labels = label_part.split(",")
    for label in labels:
        try:
            _check_label(label)
        except ComparisonError as exc:
            raise ParseError(str(exc), lineno) from exc
    try:
        stmt = Statement(subject, predicate, obj)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from exc
    return stmt, frozenset(labels)


def parse_comparison(data: str | bytes) -> ComparisonModel:
    """Parse ``.ntc`` text back into a comparison model.

    The label list of the model is the bytewise-sorted union of the
    labels observed on the entries.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    entries: dict[Statement, frozenset[str]] = {}
    labels: set[str] = set()
    if data:
        body = data[:-1] if data.endswith("\n") else data
        if body:
            for lineno, line in enumerate(body.split("\n"), start=1):
                if not line:
                    raise ParseError("empty line", lineno)
                stmt, origins = _parse_comparison_line(line, lineno)
                existing = entries.get(stmt)
                entries[stmt] = origins if existing is None else existing | origins
                labels.update(origins)
    return ComparisonModel(sorted(labels), entries)
