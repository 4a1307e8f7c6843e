"""The 21-row three-way change analysis over a comparison model.

Roles: ``base`` is the common ancestor, ``left`` the evolved reference
model, ``right`` the independently edited variant. An entity *exists* in
a role when that role's model carries a ``(e, m:type, ...)`` statement
for it. Attribute statements use ``a:``-prefixed predicates, relation
statements use ``r:``-prefixed predicates with an IRI object, and
containment uses ``m:containedIn``.

Every row is also expressible in the query language; the texts live in
``catalog_queries/`` with placeholder role labels and row counts equal
the row counts computed natively here (two implementations, one answer).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .compare import ComparisonModel, UnknownLabelError
from .query import Query, parse_query, relabel_query
from .render import format_aligned_table
from .triples import Statement

TYPE_PREDICATE = "m:type"
CONTAINMENT_PREDICATE = "m:containedIn"
ATTRIBUTE_PREFIX = "a:"
RELATION_PREFIX = "r:"


class IntegrityError(ValueError):
    """The model violates a structural assumption (containment tree)."""


@dataclass(frozen=True)
class RoleBinding:
    base: str
    left: str
    right: str

    def __post_init__(self):
        labels = (self.base, self.left, self.right)
        if len(set(labels)) != 3 or not all(labels):
            raise ValueError("roles must be three distinct non-empty labels")

    def validate(self, comparison: ComparisonModel) -> None:
        missing = {self.base, self.left, self.right} - set(comparison.labels)
        if missing:
            raise UnknownLabelError(
                f"roles not present in the comparison: {', '.join(sorted(missing))}"
            )


@dataclass(frozen=True)
class CatalogRow:
    number: int
    description: str
    entities: int | None = None
    attributes: int | None = None
    relations: int | None = None


@dataclass
class CatalogReport:
    rows: list[CatalogRow]
    diagnostics: list[str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CatalogReport):
            return NotImplemented
        return self.rows == other.rows

    def row(self, number: int) -> CatalogRow:
        return self.rows[number - 1]

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "number": r.number,
                    "description": r.description,
                    "entities": r.entities,
                    "attributes": r.attributes,
                    "relations": r.relations,
                }
                for r in self.rows
            ],
            "diagnostics": list(self.diagnostics),
        }

    def format_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n"

    def format_table(self) -> str:
        header = ["#", "Change Type", "Entities", "Attributes", "Relations"]
        body = []
        for r in self.rows:
            body.append([
                str(r.number),
                r.description,
                "" if r.entities is None else str(r.entities),
                "" if r.attributes is None else str(r.attributes),
                "" if r.relations is None else str(r.relations),
            ])
        text = format_aligned_table(header, body, right_align={0, 2, 3, 4})
        if self.diagnostics:
            text += "".join(f"note: {d}\n" for d in self.diagnostics)
        return text

    def format_csv(self) -> str:
        import csv
        import io

        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["number", "description", "entities", "attributes", "relations"])
        for r in self.rows:
            writer.writerow([
                r.number,
                r.description,
                "" if r.entities is None else r.entities,
                "" if r.attributes is None else r.attributes,
                "" if r.relations is None else r.relations,
            ])
        return out.getvalue()


ROW_DESCRIPTIONS = {
    1: "Total entities in the left model",
    2: "Total entities in the right model",
    3: "Entities present in both left and right (common entities)",
    4: "Entities with attribute changes between base and left",
    5: "Common entities changed only on the left side",
    6: "Common entities with conflicting attribute changes",
    7: "Entities added on the left side",
    8: "Added entities contained in preexisting entities",
    9: "Added entities contained in entities still present on the right",
    10: "Entities removed on the left but still present on the right",
    11: "Added entities referencing preexisting entities",
    12: "Added entities referencing entities still present on the right",
    13: "Preexisting entities referencing added entities",
    14: "Entities still present on the right referencing added entities",
    15: "Relations added between preexisting entities",
    16: "Added relations between entities still present on the right",
    17: "Relations removed between preexisting entities",
    18: "Removed relations between entities still present on the right",
    19: "Entities moved to a different parent on the left",
    20: "Common entities moved on the left but not on the right",
    21: "Entities moved to conflicting parents on the left and right",
}

# Which counts each row reports, and what one listed element looks like.
ROW_CELLS = {
    1: ("entities",), 2: ("entities",), 3: ("entities",),
    4: ("entities", "attributes"), 5: ("entities", "attributes"),
    6: ("entities", "attributes"),
    7: ("entities",), 8: ("entities",), 9: ("entities",), 10: ("entities",),
    11: ("entities", "relations"), 12: ("entities", "relations"),
    13: ("entities", "relations"), 14: ("entities", "relations"),
    15: ("relations",), 16: ("relations",), 17: ("relations",), 18: ("relations",),
    19: ("entities",), 20: ("entities",), 21: ("entities",),
}

ROW_ELEMENT_COLUMNS = {
    **{n: ("entity",) for n in (1, 2, 3, 7, 8, 9, 10, 19, 20, 21)},
    **{n: ("entity", "attribute") for n in (4, 5, 6)},
    **{n: ("source", "relation", "target") for n in (11, 12, 13, 14, 15, 16, 17, 18)},
}


class _RoleData:
    """Per-role projections of the comparison entries."""

    __slots__ = ("entities", "attrs", "relations", "containment")

    def __init__(self):
        self.entities: set[str] = set()
        # (entity, predicate) -> set of object terms
        self.attrs: dict[tuple[str, str], set] = {}
        self.relations: set[tuple[str, str, str]] = set()
        # entity -> list of parents seen (must stay a single-parent tree)
        self.containment: dict[str, list[str]] = {}

    def parent(self, entity: str, label: str) -> str | None:
        parents = self.containment.get(entity)
        if parents is None:
            return None
        if len(parents) > 1:
            raise IntegrityError(
                f"entity {entity} has {len(parents)} containment parents "
                f"in model {label!r}"
            )
        return parents[0]


class _Context:
    def __init__(self, comparison: ComparisonModel, roles: RoleBinding):
        roles.validate(comparison)
        self.roles = roles
        self.data: dict[str, _RoleData] = {
            roles.base: _RoleData(),
            roles.left: _RoleData(),
            roles.right: _RoleData(),
        }
        for stmt, origins in comparison.entries():
            relevant = [self.data[label] for label in self.data if label in origins]
            if not relevant:
                continue
            pred = stmt.predicate.value
            subject = stmt.subject.value
            if pred == TYPE_PREDICATE:
                for rd in relevant:
                    rd.entities.add(subject)
            elif pred == CONTAINMENT_PREDICATE:
                if stmt.obj.is_iri:
                    for rd in relevant:
                        rd.containment.setdefault(subject, []).append(stmt.obj.value)
            elif pred.startswith(ATTRIBUTE_PREFIX):
                key = (subject, pred)
                for rd in relevant:
                    rd.attrs.setdefault(key, set()).add(stmt.obj)
            elif pred.startswith(RELATION_PREFIX) and stmt.obj.is_iri:
                triple = (subject, pred, stmt.obj.value)
                for rd in relevant:
                    rd.relations.add(triple)

    def role(self, label: str) -> _RoleData:
        return self.data[label]

    def values(self, label: str, entity: str, pred: str) -> frozenset:
        return frozenset(self.data[label].attrs.get((entity, pred), ()))


def _changed_pairs(ctx: _Context, from_label: str, to_label: str,
                   entities: set[str]) -> set[tuple[str, str]]:
    """(entity, predicate) pairs whose attribute value sets differ."""
    from_attrs = ctx.role(from_label).attrs
    to_attrs = ctx.role(to_label).attrs
    pairs: set[tuple[str, str]] = set()
    for key, values in from_attrs.items():
        if key[0] in entities and values != to_attrs.get(key, set()):
            pairs.add(key)
    for key, values in to_attrs.items():
        if key[0] in entities and key not in pairs:
            if values != from_attrs.get(key, set()):
                pairs.add(key)
    return pairs


def _common_entities(ctx: _Context) -> set[str]:
    roles = ctx.roles
    return ctx.role(roles.left).entities & ctx.role(roles.right).entities


def _changed_entities(ctx: _Context, from_label: str,
                      to_label: str) -> dict[str, set[str]]:
    both = ctx.role(from_label).entities & ctx.role(to_label).entities
    result: dict[str, set[str]] = {}
    for entity, pred in _changed_pairs(ctx, from_label, to_label, both):
        result.setdefault(entity, set()).add(pred)
    return result


def _conflicting_attributes(ctx: _Context) -> set[tuple[str, str]]:
    roles = ctx.roles
    common = _common_entities(ctx)
    candidates = _changed_pairs(ctx, roles.left, roles.right, common)
    conflicts: set[tuple[str, str]] = set()
    for entity, pred in candidates:
        base_values = ctx.values(roles.base, entity, pred)
        if (base_values != ctx.values(roles.left, entity, pred)
                and base_values != ctx.values(roles.right, entity, pred)):
            conflicts.add((entity, pred))
    return conflicts


def _new_entities(ctx: _Context) -> tuple[set[str], set[str], set[str], list[str]]:
    roles = ctx.roles
    left = ctx.role(roles.left)
    base_entities = ctx.role(roles.base).entities
    right_entities = ctx.role(roles.right).entities
    added = left.entities - base_entities
    contained_in_base: set[str] = set()
    contained_in_right: set[str] = set()
    diagnostics: list[str] = []
    for entity in sorted(added):
        parent = left.parent(entity, roles.left)
        if parent is None:
            diagnostics.append(
                f"added entity {entity} has no containment parent in "
                f"model {roles.left!r}"
            )
            continue
        if parent in base_entities:
            contained_in_base.add(entity)
            if parent in right_entities:
                contained_in_right.add(entity)
    return added, contained_in_base, contained_in_right, diagnostics


def _deleted_still_present(ctx: _Context) -> set[str]:
    roles = ctx.roles
    return (ctx.role(roles.base).entities
            - ctx.role(roles.left).entities) & ctx.role(roles.right).entities


def _reference_analyses(ctx: _Context) -> dict[int, set[tuple[str, str, str]]]:
    roles = ctx.roles
    base_entities = ctx.role(roles.base).entities
    right_entities = ctx.role(roles.right).entities
    added = ctx.role(roles.left).entities - base_entities
    out: dict[int, set[tuple[str, str, str]]] = {11: set(), 12: set(), 13: set(), 14: set()}
    for rel in ctx.role(roles.left).relations:
        source, _, target = rel
        if source in added and target in base_entities:
            out[11].add(rel)
            if target in right_entities:
                out[12].add(rel)
        if source in base_entities and target in added:
            out[13].add(rel)
            if source in right_entities:
                out[14].add(rel)
    return out


def _relation_deltas(ctx: _Context) -> dict[int, set[tuple[str, str, str]]]:
    roles = ctx.roles
    base = ctx.role(roles.base)
    left = ctx.role(roles.left)
    right_entities = ctx.role(roles.right).entities
    out: dict[int, set[tuple[str, str, str]]] = {15: set(), 16: set(), 17: set(), 18: set()}
    for rel in left.relations - base.relations:
        source, _, target = rel
        if source in base.entities and target in base.entities:
            out[15].add(rel)
            if source in right_entities and target in right_entities:
                out[16].add(rel)
    for rel in base.relations - left.relations:
        source, _, target = rel
        if source in base.entities and target in base.entities:
            out[17].add(rel)
            if source in right_entities and target in right_entities:
                out[18].add(rel)
    return out


def _moved(ctx: _Context, label: str) -> set[str]:
    roles = ctx.roles
    base = ctx.role(roles.base)
    other = ctx.role(label)
    moved: set[str] = set()
    for entity in base.entities & other.entities:
        if base.parent(entity, roles.base) != other.parent(entity, label):
            moved.add(entity)
    return moved


def _moved_entities(ctx: _Context) -> tuple[set[str], set[str], set[str]]:
    roles = ctx.roles
    moved_left = _moved(ctx, roles.left)
    moved_right = _moved(ctx, roles.right)
    common = _common_entities(ctx)
    row20 = (moved_left & common) - moved_right
    row21: set[str] = set()
    left = ctx.role(roles.left)
    right = ctx.role(roles.right)
    for entity in moved_left & moved_right:
        if left.parent(entity, roles.left) != right.parent(entity, roles.right):
            row21.add(entity)
    return moved_left, row20, row21


# --- public single-row operations -------------------------------------------

def common_entities(comparison: ComparisonModel, roles: RoleBinding) -> set[str]:
    """Entities present in both the left and the right model (row 3)."""
    return _common_entities(_Context(comparison, roles))


def changed_entities(comparison: ComparisonModel, roles: RoleBinding,
                     from_label: str, to_label: str) -> dict[str, set[str]]:
    """Entities in both roles whose attribute value sets differ, mapped
    to the predicates that changed (row 4 uses base to left)."""
    return _changed_entities(_Context(comparison, roles), from_label, to_label)


def conflicting_attributes(comparison: ComparisonModel,
                           roles: RoleBinding) -> set[tuple[str, str]]:
    """Common-entity attribute pairs changed differently by both sides (row 6)."""
    return _conflicting_attributes(_Context(comparison, roles))


def new_entities(comparison: ComparisonModel,
                 roles: RoleBinding) -> tuple[set[str], set[str], set[str]]:
    """Rows 7, 8, 9: added entities and their containment sub-classes."""
    added, in_base, in_right, _ = _new_entities(_Context(comparison, roles))
    return added, in_base, in_right


def deleted_still_present(comparison: ComparisonModel,
                          roles: RoleBinding) -> set[str]:
    """Row 10: removed on the left yet still present on the right."""
    return _deleted_still_present(_Context(comparison, roles))


def reference_analyses(comparison: ComparisonModel,
                       roles: RoleBinding) -> dict[int, set[tuple[str, str, str]]]:
    """Rows 11-14 as sets of qualifying relation statements."""
    return _reference_analyses(_Context(comparison, roles))


def relation_deltas(comparison: ComparisonModel,
                    roles: RoleBinding) -> dict[int, set[tuple[str, str, str]]]:
    """Rows 15-18 as sets of added/removed relation statements."""
    return _relation_deltas(_Context(comparison, roles))


def moved_entities(comparison: ComparisonModel,
                   roles: RoleBinding) -> tuple[set[str], set[str], set[str]]:
    """Rows 19, 20, 21: containment moves and their interactions."""
    return _moved_entities(_Context(comparison, roles))


def _row5_row6(ctx: _Context) -> tuple[set[str], set[tuple[str, str]],
                                       set[str], set[tuple[str, str]]]:
    roles = ctx.roles
    changed_left = _changed_entities(ctx, roles.base, roles.left)
    common = _common_entities(ctx)
    conflicts = _conflicting_attributes(ctx)
    conflict_entities = {entity for entity, _ in conflicts}
    row5_entities = {
        e for e in changed_left if e in common and e not in conflict_entities
    }
    row5_pairs = {
        (e, p) for e, preds in changed_left.items() if e in row5_entities
        for p in preds
    }
    return row5_entities, row5_pairs, conflict_entities, conflicts


def run_catalog(comparison: ComparisonModel, roles: RoleBinding) -> CatalogReport:
    """Compute all 21 rows. Rows 4 to 21 are zero when left equals base
    and right equals base."""
    ctx = _Context(comparison, roles)

    left_entities = ctx.role(roles.left).entities
    right_entities = ctx.role(roles.right).entities
    common = _common_entities(ctx)
    changed_left = _changed_entities(ctx, roles.base, roles.left)
    changed_left_pairs = sum(len(p) for p in changed_left.values())
    row5_entities, row5_pairs, conflict_entities, conflicts = _row5_row6(ctx)
    added, in_base, in_right, diagnostics = _new_entities(ctx)
    refs = _reference_analyses(ctx)
    deltas = _relation_deltas(ctx)
    moved_left, row20, row21 = _moved_entities(ctx)

    def entity_count(rels: set[tuple[str, str, str]], position: int) -> int:
        return len({rel[position] for rel in rels})

    rows = [
        CatalogRow(1, ROW_DESCRIPTIONS[1], entities=len(left_entities)),
        CatalogRow(2, ROW_DESCRIPTIONS[2], entities=len(right_entities)),
        CatalogRow(3, ROW_DESCRIPTIONS[3], entities=len(common)),
        CatalogRow(4, ROW_DESCRIPTIONS[4], entities=len(changed_left),
                   attributes=changed_left_pairs),
        CatalogRow(5, ROW_DESCRIPTIONS[5], entities=len(row5_entities),
                   attributes=len(row5_pairs)),
        CatalogRow(6, ROW_DESCRIPTIONS[6], entities=len(conflict_entities),
                   attributes=len(conflicts)),
        CatalogRow(7, ROW_DESCRIPTIONS[7], entities=len(added)),
        CatalogRow(8, ROW_DESCRIPTIONS[8], entities=len(in_base)),
        CatalogRow(9, ROW_DESCRIPTIONS[9], entities=len(in_right)),
        CatalogRow(10, ROW_DESCRIPTIONS[10],
                   entities=len(_deleted_still_present(ctx))),
        CatalogRow(11, ROW_DESCRIPTIONS[11], entities=entity_count(refs[11], 0),
                   relations=len(refs[11])),
        CatalogRow(12, ROW_DESCRIPTIONS[12], entities=entity_count(refs[12], 0),
                   relations=len(refs[12])),
        CatalogRow(13, ROW_DESCRIPTIONS[13], entities=entity_count(refs[13], 0),
                   relations=len(refs[13])),
        CatalogRow(14, ROW_DESCRIPTIONS[14], entities=entity_count(refs[14], 0),
                   relations=len(refs[14])),
        CatalogRow(15, ROW_DESCRIPTIONS[15], relations=len(deltas[15])),
        CatalogRow(16, ROW_DESCRIPTIONS[16], relations=len(deltas[16])),
        CatalogRow(17, ROW_DESCRIPTIONS[17], relations=len(deltas[17])),
        CatalogRow(18, ROW_DESCRIPTIONS[18], relations=len(deltas[18])),
        CatalogRow(19, ROW_DESCRIPTIONS[19], entities=len(moved_left)),
        CatalogRow(20, ROW_DESCRIPTIONS[20], entities=len(row20)),
        CatalogRow(21, ROW_DESCRIPTIONS[21], entities=len(row21)),
    ]
    return CatalogReport(rows=rows, diagnostics=diagnostics)


def row_elements(comparison: ComparisonModel, roles: RoleBinding,
                 number: int) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
    """The elements behind one row: (column names, sorted element tuples).

    Entity rows list entity IRIs, attribute rows list (entity,
    predicate) pairs, relation rows list (source, predicate, target)
    statements.
    """
    if number not in ROW_DESCRIPTIONS:
        raise ValueError(f"row number must be 1..21, got {number}")
    ctx = _Context(comparison, roles)
    roles_ = ctx.roles

    def entity_rows(entities: set[str]) -> list[tuple[str, ...]]:
        return [(e,) for e in sorted(entities)]

    def rel_rows(rels: set[tuple[str, str, str]]) -> list[tuple[str, ...]]:
        return sorted(rels)

    if number == 1:
        elements = entity_rows(ctx.role(roles_.left).entities)
    elif number == 2:
        elements = entity_rows(ctx.role(roles_.right).entities)
    elif number == 3:
        elements = entity_rows(_common_entities(ctx))
    elif number == 4:
        changed = _changed_entities(ctx, roles_.base, roles_.left)
        elements = sorted((e, p) for e, preds in changed.items() for p in preds)
    elif number == 5:
        _, row5_pairs, _, _ = _row5_row6(ctx)
        elements = sorted(row5_pairs)
    elif number == 6:
        elements = sorted(_conflicting_attributes(ctx))
    elif number in (7, 8, 9):
        added, in_base, in_right, _ = _new_entities(ctx)
        elements = entity_rows({7: added, 8: in_base, 9: in_right}[number])
    elif number == 10:
        elements = entity_rows(_deleted_still_present(ctx))
    elif number in (11, 12, 13, 14):
        elements = rel_rows(_reference_analyses(ctx)[number])
    elif number in (15, 16, 17, 18):
        elements = rel_rows(_relation_deltas(ctx)[number])
    else:
        moved_left, row20, row21 = _moved_entities(ctx)
        elements = entity_rows({19: moved_left, 20: row20, 21: row21}[number])
    return ROW_ELEMENT_COLUMNS[number], elements


# --- shipped query texts -----------------------------------------------------

_PLACEHOLDER_ROLES = ("base", "left", "right")


@lru_cache(maxsize=None)
def _load_template(number: int, cell: str) -> Query:
    name = f"row{number:02d}_{cell}.dq"
    text = resources.files("triplediff.catalog_queries").joinpath(name).read_text("utf-8")
    return parse_query(text)


def row_query(number: int, cell: str, roles: RoleBinding) -> Query:
    """The shipped query for one row cell, relabeled to the given roles."""
    if number not in ROW_CELLS or cell not in ROW_CELLS[number]:
        raise ValueError(f"no query for row {number} cell {cell!r}")
    mapping = {
        "base": roles.base,
        "left": roles.left,
        "right": roles.right,
    }
    return relabel_query(_load_template(number, cell), mapping)


def row_query_text(number: int, cell: str) -> str:
    """Raw shipped query text (placeholder labels base/left/right)."""
    name = f"row{number:02d}_{cell}.dq"
    return resources.files("triplediff.catalog_queries").joinpath(name).read_text("utf-8")
