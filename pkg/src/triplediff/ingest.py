"""XML ingestion: map identifier-bearing XML documents onto triple graphs.

The mapping convention is fixed; only the attribute names are
configurable:

* an element carrying the id attribute becomes an entity ``e:<id>`` with
  a ``(e:<id>, m:type, "<tag>")`` statement
* a text-only child of an entity becomes ``(e:<id>, a:<childTag>, "<text>")``
  with the text trimmed at both ends
* a child carrying the ref attribute becomes ``(e:<id>, r:<childTag>, e:<ref>)``
* an entity nested inside another entity yields
  ``(e:<childId>, m:containedIn, e:<nearestEnclosingEntityId>)``

Everything else is skipped and reported. Reference targets must resolve
to an id somewhere in the document, otherwise ingestion fails without
emitting a graph.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .triples import ModelGraph, Statement, iri, literal

TYPE_PREDICATE = "m:type"
CONTAINMENT_PREDICATE = "m:containedIn"
ATTRIBUTE_PREFIX = "a:"
RELATION_PREFIX = "r:"
ENTITY_PREFIX = "e:"


class IngestError(Exception):
    """Base class for ingestion failures."""


class XmlSyntaxError(IngestError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DuplicateIdError(IngestError):
    def __init__(self, entity_id: str, first_path: str, second_path: str):
        self.entity_id = entity_id
        self.first_path = first_path
        self.second_path = second_path
        super().__init__(
            f"duplicate id {entity_id!r} at {first_path} and {second_path}"
        )


class DanglingReferenceError(IngestError):
    def __init__(self, references: list[tuple[str, str]]):
        self.references = references
        listing = ", ".join(f"{ref!r} at {path}" for ref, path in references)
        super().__init__(f"unresolved references: {listing}")


@dataclass
class IngestReport:
    entity_count: int = 0
    attribute_statement_count: int = 0
    relation_statement_count: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "entities": self.entity_count,
            "attribute_statements": self.attribute_statement_count,
            "relation_statements": self.relation_statement_count,
            "skipped": [
                {"path": path, "reason": reason} for path, reason in self.skipped
            ],
        }

    def format_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n"

    def format_table(self) -> str:
        lines = [
            f"entities              {self.entity_count}",
            f"attribute statements  {self.attribute_statement_count}",
            f"relation statements   {self.relation_statement_count}",
            f"skipped elements      {len(self.skipped)}",
        ]
        for path, reason in self.skipped:
            lines.append(f"  {path}: {reason}")
        return "\n".join(lines) + "\n"


class _Walker:
    def __init__(self, id_attr: str, ref_attr: str):
        self.id_attr = id_attr
        self.ref_attr = ref_attr
        self.ids: dict[str, str] = {}  # id -> element path
        self.refs: list[tuple[str, str]] = []  # (ref value, element path)
        self.statements: set[Statement] = set()
        self.skipped: list[tuple[str, str]] = []

    def _entity_iri(self, value: str, path: str):
        try:
            return iri(ENTITY_PREFIX + value)
        except ValueError as exc:
            raise IngestError(f"{path}: invalid identifier {value!r}: {exc}") from exc

    def _predicate(self, prefix: str, tag: str, path: str):
        try:
            return iri(prefix + tag)
        except ValueError as exc:
            raise IngestError(f"{path}: element tag {tag!r} unusable: {exc}") from exc

    def walk(self, elem: ET.Element, path: str, nearest_entity: str | None,
             parent_entity: str | None, is_root: bool) -> None:
        entity_id = elem.get(self.id_attr)
        if entity_id is not None:
            self._enter_entity(elem, path, entity_id, nearest_entity)
            return

        ref = elem.get(self.ref_attr)
        if ref is not None:
            if parent_entity is None:
                self.skipped.append((path, "reference element outside an entity"))
            else:
                target = self._entity_iri(ref, path)
                self.refs.append((ref, path))
                self.statements.add(Statement(
                    self._entity_iri(parent_entity, path),
                    self._predicate(RELATION_PREFIX, elem.tag, path),
                    target,
                ))
            self._descend(elem, path, nearest_entity, None)
            return

        if len(elem) == 0:
            if parent_entity is None:
                if not is_root:
                    self.skipped.append((path, "element outside an entity"))
            else:
                text = (elem.text or "").strip()
                self.statements.add(Statement(
                    self._entity_iri(parent_entity, path),
                    self._predicate(ATTRIBUTE_PREFIX, elem.tag, path),
                    literal(text),
                ))
            return

        # Element with children and neither id nor ref.
        if parent_entity is not None and (elem.text or "").strip():
            self.skipped.append((path, "mixed content (text and child elements)"))
        elif not is_root:
            self.skipped.append((path, "structural element with no mapping rule"))
        self._descend(elem, path, nearest_entity, None)

    def _enter_entity(self, elem: ET.Element, path: str, entity_id: str,
                      nearest_entity: str | None) -> None:
        subject = self._entity_iri(entity_id, path)
        if entity_id in self.ids:
            raise DuplicateIdError(entity_id, self.ids[entity_id], path)
        self.ids[entity_id] = path
        self.statements.add(Statement(
            subject, iri(TYPE_PREDICATE), literal(elem.tag)
        ))
        if nearest_entity is not None:
            self.statements.add(Statement(
                subject,
                iri(CONTAINMENT_PREDICATE),
                self._entity_iri(nearest_entity, path),
            ))
        if elem.get(self.ref_attr) is not None:
            self.skipped.append((path, "ref attribute on an entity element is ignored"))
        self._descend(elem, path, entity_id, entity_id)

    def _descend(self, elem: ET.Element, path: str, nearest_entity: str | None,
                 parent_entity: str | None) -> None:
        tag_counts: dict[str, int] = {}
        for child in elem:
            index = tag_counts.get(child.tag, 0) + 1
            tag_counts[child.tag] = index
            child_path = f"{path}/{child.tag}[{index}]"
            self.walk(child, child_path, nearest_entity, parent_entity, is_root=False)


def ingest_xml(data: str | bytes, id_attr: str = "id",
               ref_attr: str = "ref") -> tuple[ModelGraph, IngestReport]:
    """Convert an XML document into a graph plus an ingestion report.

    Raises XmlSyntaxError for malformed XML, DuplicateIdError when two
    elements share an id, and DanglingReferenceError when a reference
    does not resolve; no graph is produced in those cases.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise XmlSyntaxError(f"malformed XML: {exc.msg if hasattr(exc, 'msg') else exc}",
                             line, column) from exc

    walker = _Walker(id_attr, ref_attr)
    walker.walk(root, f"/{root.tag}", None, None, is_root=True)

    dangling = [(ref, path) for ref, path in walker.refs if ref not in walker.ids]
    if dangling:
        raise DanglingReferenceError(dangling)

    graph = ModelGraph(walker.statements)
    report = IngestReport(skipped=walker.skipped)
    entities = set()
    for stmt in graph.statements:
        pred = stmt.predicate.value
        if pred == TYPE_PREDICATE:
            entities.add(stmt.subject.value)
        elif pred.startswith(ATTRIBUTE_PREFIX):
            report.attribute_statement_count += 1
        elif pred.startswith(RELATION_PREFIX):
            report.relation_statement_count += 1
    report.entity_count = len(entities)
    return graph, report
