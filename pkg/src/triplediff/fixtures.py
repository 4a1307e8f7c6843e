"""Deterministic synthetic three-way fixtures with a ground-truth ledger.

A fixture is a base model (a containment tree of typed entities with
attributes and cross-relations) plus two derived branches, ``left`` and
``right``, produced by applying seeded edits: entity deletions and
additions, attribute edits, containment moves, relation additions and
deletions, and attribute conflicts injected on entities surviving in
both branches. Every edit is recorded in a ChangeLedger from which the
full 21-row analysis can be recomputed without looking at the graphs.

Reproducibility: all randomness comes from SplitMix64 (the standard
constants 0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9, 0x94D049BB133111EB),
consumed in the documented generation order below. Bounded draws use
rejection sampling on the top 64-bit stream; probability draws compare a
53-bit draw against ``round(rate * 2**53)``. Identical spec and seed
therefore produce byte-identical outputs, independent of platform.

Generation order: base parents, types, attribute counts and values,
relations; left deletions, right deletions; joint attribute
classification (conflict, left edit, right edit) in entity and predicate
order; then per branch (left first): moves, added entities, relation
deletions, relation additions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catalog import ROW_DESCRIPTIONS, CatalogReport, CatalogRow
from .triples import ModelGraph, Statement, iri, literal

_MASK64 = (1 << 64) - 1
_FLOAT_BITS = 53


class FixtureError(ValueError):
    pass


class SplitMix64:
    """SplitMix64 pseudo-random stream; fully specified, no platform deps."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = ((1 << 64) // n) * n
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def chance(self, rate: float) -> bool:
        """True with probability ``rate`` using a 53-bit threshold."""
        threshold = round(rate * (1 << _FLOAT_BITS))
        return self.below(1 << _FLOAT_BITS) < threshold

    def fraction(self) -> float:
        return self.below(1 << _FLOAT_BITS) / (1 << _FLOAT_BITS)

    def choice(self, seq):
        return seq[self.below(len(seq))]


@dataclass(frozen=True)
class BranchRates:
    attribute_edit_rate: float = 0.0
    delete_rate: float = 0.0
    add_rate: float = 0.0
    move_rate: float = 0.0
    relation_add_rate: float = 0.0
    relation_delete_rate: float = 0.0

    def validate(self, name: str) -> None:
        for field_name in ("attribute_edit_rate", "delete_rate", "add_rate",
                           "move_rate", "relation_add_rate", "relation_delete_rate"):
            value = getattr(self, field_name)
            if not 0.0 <= value <= 1.0:
                raise FixtureError(f"{name}.{field_name} must be in [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "attribute_edit_rate": self.attribute_edit_rate,
            "delete_rate": self.delete_rate,
            "add_rate": self.add_rate,
            "move_rate": self.move_rate,
            "relation_add_rate": self.relation_add_rate,
            "relation_delete_rate": self.relation_delete_rate,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BranchRates":
        return cls(**data)


@dataclass(frozen=True)
class FixtureSpec:
    seed: int
    entity_count: int = 200
    attrs_per_entity: float = 2.4
    relation_count: int = 300
    conflict_rate: float = 0.02
    left: BranchRates = field(default_factory=BranchRates)
    right: BranchRates = field(default_factory=BranchRates)

    def validate(self) -> None:
        if self.entity_count < 2:
            raise FixtureError("entity_count must be at least 2")
        if self.entity_count > 99999:
            raise FixtureError("entity_count must be at most 99999")
        if self.attrs_per_entity < 0:
            raise FixtureError("attrs_per_entity must be non-negative")
        if self.relation_count < 0:
            raise FixtureError("relation_count must be non-negative")
        if not 0.0 <= self.conflict_rate <= 1.0:
            raise FixtureError("conflict_rate must be in [0, 1]")
        self.left.validate("left")
        self.right.validate("right")
        joint = (self.conflict_rate + self.left.attribute_edit_rate
                 + self.right.attribute_edit_rate)
        if joint > 1.0:
            raise FixtureError(
                "conflict_rate + left and right attribute_edit_rate must "
                "not exceed 1"
            )

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "entity_count": self.entity_count,
            "attrs_per_entity": self.attrs_per_entity,
            "relation_count": self.relation_count,
            "conflict_rate": self.conflict_rate,
            "left": self.left.to_json_dict(),
            "right": self.right.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FixtureSpec":
        data = dict(data)
        left = BranchRates.from_json_dict(data.pop("left", {}))
        right = BranchRates.from_json_dict(data.pop("right", {}))
        return cls(left=left, right=right, **data)


# Mirrors the published sizing of a large process model release: about
# 2100 entities, 5000 attribute values and 4100 relations, with the
# reference branch evolving in place and the variant branch dropping
# more than half of the entities before extending the remainder.
PAPER_SCALE = FixtureSpec(
    seed=20070101,
    entity_count=2100,
    attrs_per_entity=2.4,
    relation_count=4100,
    conflict_rate=0.04,
    left=BranchRates(
        attribute_edit_rate=0.22,
        delete_rate=0.0,
        add_rate=0.14,
        move_rate=0.04,
        relation_add_rate=0.02,
        relation_delete_rate=0.03,
    ),
    right=BranchRates(
        attribute_edit_rate=0.16,
        delete_rate=0.52,
        add_rate=0.08,
        move_rate=0.01,
        relation_add_rate=0.015,
        relation_delete_rate=0.03,
    ),
)


@dataclass(frozen=True)
class AddedEntity:
    entity: str
    parent: str


@dataclass(frozen=True)
class Move:
    entity: str
    new_parent: str


@dataclass
class BranchChanges:
    added: list[AddedEntity] = field(default_factory=list)
    deleted: list[str] = field(default_factory=list)
    attribute_edits: list[tuple[str, str]] = field(default_factory=list)
    moved: list[Move] = field(default_factory=list)
    relations_added: list[tuple[str, str, str]] = field(default_factory=list)
    relations_deleted: list[tuple[str, str, str]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "added": [{"entity": a.entity, "parent": a.parent}
                      for a in sorted(self.added, key=lambda a: a.entity)],
            "deleted": sorted(self.deleted),
            "attribute_edits": sorted(list(p) for p in self.attribute_edits),
            "moved": [{"entity": m.entity, "new_parent": m.new_parent}
                      for m in sorted(self.moved, key=lambda m: m.entity)],
            "relations_added": sorted(list(r) for r in self.relations_added),
            "relations_deleted": sorted(list(r) for r in self.relations_deleted),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BranchChanges":
        return cls(
            added=[AddedEntity(d["entity"], d["parent"]) for d in data["added"]],
            deleted=list(data["deleted"]),
            attribute_edits=[tuple(p) for p in data["attribute_edits"]],
            moved=[Move(d["entity"], d["new_parent"]) for d in data["moved"]],
            relations_added=[tuple(r) for r in data["relations_added"]],
            relations_deleted=[tuple(r) for r in data["relations_deleted"]],
        )


@dataclass
class ChangeLedger:
    base_entities: list[str]
    left: BranchChanges
    right: BranchChanges
    conflicts: list[tuple[str, str]]

    def to_json_dict(self) -> dict:
        return {
            "base_entities": sorted(self.base_entities),
            "left": self.left.to_json_dict(),
            "right": self.right.to_json_dict(),
            "conflicts": sorted(list(p) for p in self.conflicts),
        }

    def format_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChangeLedger":
        return cls(
            base_entities=list(data["base_entities"]),
            left=BranchChanges.from_json_dict(data["left"]),
            right=BranchChanges.from_json_dict(data["right"]),
            conflicts=[tuple(p) for p in data["conflicts"]],
        )


TYPE_NAMES = ("Activity", "Product", "Role", "Discipline", "Milestone",
              "Topic", "Tool", "Section")
ATTR_PREDICATES = ("a:Name", "a:Description", "a:Status", "a:Version",
                   "a:Number", "a:Note")
RELATION_PREDICATES = ("r:produces", "r:dependsOn", "r:references",
                       "r:assignedTo", "r:refines")
STATUS_VALUES = ("draft", "review", "approved", "retired")
WORDS = (
    "system", "design", "review", "plan", "release", "quality", "module",
    "test", "concept", "report", "budget", "phase", "interface", "risk",
    "scope", "change", "detail", "draft", "final", "update", "analysis",
    "process", "product", "support", "control", "audit", "baseline",
    "contract", "delivery", "estimate", "guideline", "handover", "input",
    "output", "milestone", "overview", "priority", "resource", "schedule",
    "summary", "training", "transition", "validation", "decision",
)


class _Generator:
    def __init__(self, spec: FixtureSpec):
        spec.validate()
        self.spec = spec
        self.rng = SplitMix64(spec.seed)

    def _words(self, count: int) -> str:
        return " ".join(self.rng.choice(WORDS) for _ in range(count))

    def _value(self, pred: str) -> str:
        if pred == "a:Name":
            return self._words(2)
        if pred == "a:Description":
            return self._words(6 + self.rng.below(7))
        if pred == "a:Status":
            return self.rng.choice(STATUS_VALUES)
        if pred == "a:Version":
            return f"{1 + self.rng.below(3)}.{self.rng.below(10)}"
        if pred == "a:Number":
            return str(self.rng.below(10000))
        return self._words(3 + self.rng.below(4))

    def _edited_value(self, pred: str, old: str, avoid: str | None = None) -> str:
        # Replace one word; redraw until it differs from the old value and
        # from the other branch's result when injecting a conflict.
        for _ in range(64):
            words = old.split()
            if not words:
                candidate = self.rng.choice(WORDS)
            else:
                index = self.rng.below(len(words))
                words[index] = self.rng.choice(WORDS)
                candidate = " ".join(words)
            if candidate != old and candidate != avoid:
                return candidate
        raise FixtureError(f"could not derive a distinct edited value for {pred}")

    def generate(self) -> tuple[ModelGraph, ModelGraph, ModelGraph, ChangeLedger]:
        spec = self.spec
        rng = self.rng
        n = spec.entity_count

        # Base model: tree, types, attributes, relations.
        ids = [f"e:b{i:05d}" for i in range(1, n + 1)]
        base_parent: dict[str, str | None] = {ids[0]: None}
        for i in range(1, n):
            base_parent[ids[i]] = ids[rng.below(i)]
        types = {e: rng.choice(TYPE_NAMES) for e in ids}

        whole = int(spec.attrs_per_entity)
        frac = spec.attrs_per_entity - whole
        attrs: dict[tuple[str, str], str] = {}
        entity_preds: dict[str, tuple[str, ...]] = {}
        for e in ids:
            k = whole + (1 if rng.chance(frac) else 0)
            k = min(k, len(ATTR_PREDICATES))
            preds = ATTR_PREDICATES[:k]
            entity_preds[e] = preds
            for pred in preds:
                attrs[(e, pred)] = self._value(pred)

        base_rels: set[tuple[str, str, str]] = set()
        attempts = 0
        while len(base_rels) < spec.relation_count:
            attempts += 1
            if attempts > spec.relation_count * 100 + 1000:
                raise FixtureError("relation_count too dense for entity_count")
            s = ids[rng.below(n)]
            t = ids[rng.below(n)]
            if s == t:
                continue
            rel = (s, rng.choice(RELATION_PREDICATES), t)
            if rel not in base_rels:
                base_rels.add(rel)

        # Deletions.
        deleted_left = [e for e in ids if rng.chance(spec.left.delete_rate)]
        deleted_right = [e for e in ids if rng.chance(spec.right.delete_rate)]
        surv_left = [e for e in ids if e not in set(deleted_left)]
        surv_right = [e for e in ids if e not in set(deleted_right)]
        surv_left_set, surv_right_set = set(surv_left), set(surv_right)

        # Attribute classification: conflicts first, then one-sided edits.
        left_values: dict[tuple[str, str], str] = {}
        right_values: dict[tuple[str, str], str] = {}
        conflicts: list[tuple[str, str]] = []
        left_edits: list[tuple[str, str]] = []
        right_edits: list[tuple[str, str]] = []
        c_rate = spec.conflict_rate
        l_rate = spec.left.attribute_edit_rate
        r_rate = spec.right.attribute_edit_rate
        for e in ids:
            in_left = e in surv_left_set
            in_right = e in surv_right_set
            for pred in entity_preds[e]:
                key = (e, pred)
                old = attrs[key]
                if in_left and in_right:
                    u = rng.fraction()
                    if u < c_rate:
                        left_values[key] = self._edited_value(pred, old)
                        right_values[key] = self._edited_value(
                            pred, old, avoid=left_values[key])
                        conflicts.append(key)
                    elif u < c_rate + l_rate:
                        left_values[key] = self._edited_value(pred, old)
                        left_edits.append(key)
                    elif u < c_rate + l_rate + r_rate:
                        right_values[key] = self._edited_value(pred, old)
                        right_edits.append(key)
                elif in_left:
                    if rng.chance(l_rate):
                        left_values[key] = self._edited_value(pred, old)
                        left_edits.append(key)
                elif in_right:
                    if rng.chance(r_rate):
                        right_values[key] = self._edited_value(pred, old)
                        right_edits.append(key)

        ledger = ChangeLedger(
            base_entities=list(ids),
            left=BranchChanges(deleted=deleted_left, attribute_edits=left_edits),
            right=BranchChanges(deleted=deleted_right, attribute_edits=right_edits),
            conflicts=conflicts,
        )

        branch_state = {}
        for name, rates, survivors, changes in (
            ("l", spec.left, surv_left, ledger.left),
            ("r", spec.right, surv_right, ledger.right),
        ):
            branch_state[name] = self._branch_edits(
                name, rates, survivors, base_parent, base_rels, changes)

        base_graph = self._assemble(
            ids, base_parent, types, entity_preds, attrs, {}, base_rels,
            [], {}, {})
        left_graph = self._assemble(
            surv_left, base_parent, types, entity_preds, attrs, left_values,
            branch_state["l"]["relations"], ledger.left.added,
            branch_state["l"]["added_data"], branch_state["l"]["moves"])
        right_graph = self._assemble(
            surv_right, base_parent, types, entity_preds, attrs, right_values,
            branch_state["r"]["relations"], ledger.right.added,
            branch_state["r"]["added_data"], branch_state["r"]["moves"])

        for label, graph in (("base", base_graph), ("left", left_graph),
                             ("right", right_graph)):
            if not any(s.predicate.value == "m:type" for s in graph.statements):
                raise FixtureError(
                    f"the configured rates produce an empty {label} model"
                )
        return base_graph, left_graph, right_graph, ledger

    def _branch_edits(self, prefix: str, rates: BranchRates,
                      survivors: list[str], base_parent: dict[str, str | None],
                      base_rels: set[tuple[str, str, str]],
                      changes: BranchChanges) -> dict:
        rng = self.rng
        survivor_set = set(survivors)

        # Moves: survivors re-parented below another survivor.
        moves: dict[str, str] = {}
        for e in survivors:
            if not rng.chance(rates.move_rate):
                continue
            candidates = [c for c in survivors if c != e and c != base_parent[e]]
            if not candidates:
                continue
            new_parent = candidates[rng.below(len(candidates))]
            moves[e] = new_parent
            changes.moved.append(Move(e, new_parent))

        # Added entities, parented below survivors or earlier additions.
        n_add = round(rates.add_rate * self.spec.entity_count)
        added_ids: list[str] = []
        added_data: dict[str, dict] = {}
        for j in range(1, n_add + 1):
            entity = f"e:{prefix}{j:05d}"
            pool = survivors + added_ids
            parent = pool[rng.below(len(pool))]
            k = int(self.spec.attrs_per_entity)
            k = min(k + (1 if rng.chance(self.spec.attrs_per_entity - int(self.spec.attrs_per_entity)) else 0),
                    len(ATTR_PREDICATES))
            preds = ATTR_PREDICATES[:k]
            added_data[entity] = {
                "type": rng.choice(TYPE_NAMES),
                "parent": parent,
                "attrs": {pred: self._value(pred) for pred in preds},
            }
            added_ids.append(entity)
            changes.added.append(AddedEntity(entity, parent))

        # Relation deletions: forced when an endpoint is gone, drawn otherwise.
        relations: set[tuple[str, str, str]] = set()
        for rel in sorted(base_rels):
            s, _, t = rel
            if s not in survivor_set or t not in survivor_set:
                changes.relations_deleted.append(rel)
                continue
            if rng.chance(rates.relation_delete_rate):
                changes.relations_deleted.append(rel)
                continue
            relations.add(rel)

        # Relation additions between present entities.
        n_rel_add = round(rates.relation_add_rate * self.spec.relation_count)
        present = survivors + added_ids
        added_rels: set[tuple[str, str, str]] = set()
        attempts = 0
        while len(added_rels) < n_rel_add:
            attempts += 1
            if attempts > n_rel_add * 100 + 1000:
                raise FixtureError("relation_add_rate too dense for the model")
            s = present[rng.below(len(present))]
            t = present[rng.below(len(present))]
            if s == t:
                continue
            rel = (s, rng.choice(RELATION_PREDICATES), t)
            if rel in base_rels or rel in added_rels:
                continue
            added_rels.add(rel)
            changes.relations_added.append(rel)
        relations |= added_rels

        return {"relations": relations, "added_data": added_data, "moves": moves}

    def _assemble(self, survivors: list[str], base_parent: dict[str, str | None],
                  types: dict[str, str], entity_preds: dict[str, tuple[str, ...]],
                  base_attrs: dict[tuple[str, str], str],
                  branch_values: dict[tuple[str, str], str],
                  relations: set[tuple[str, str, str]],
                  added: list[AddedEntity], added_data: dict[str, dict],
                  moves: dict[str, str]) -> ModelGraph:
        statements: list[Statement] = []
        for e in survivors:
            statements.append(Statement(iri(e), iri("m:type"), literal(types[e])))
            parent = moves.get(e, base_parent[e])
            if parent is not None:
                statements.append(Statement(iri(e), iri("m:containedIn"), iri(parent)))
            for pred in entity_preds[e]:
                key = (e, pred)
                value = branch_values.get(key, base_attrs[key])
                statements.append(Statement(iri(e), iri(pred), literal(value)))
        for item in added:
            data = added_data[item.entity]
            statements.append(Statement(iri(item.entity), iri("m:type"),
                                        literal(data["type"])))
            statements.append(Statement(iri(item.entity), iri("m:containedIn"),
                                        iri(data["parent"])))
            for pred, value in data["attrs"].items():
                statements.append(Statement(iri(item.entity), iri(pred),
                                            literal(value)))
        for s, p, t in relations:
            statements.append(Statement(iri(s), iri(p), iri(t)))
        return ModelGraph(statements)


def generate_fixture(spec: FixtureSpec) -> tuple[ModelGraph, ModelGraph,
                                                 ModelGraph, ChangeLedger]:
    """Generate (base, left, right, ledger) for the spec; pure in the seed."""
    return _Generator(spec).generate()


def report_from_ledger(ledger: ChangeLedger) -> CatalogReport:
    """Recompute the 21-row report from the ledger alone.

    This is an independent route to the same numbers as the catalog
    analysis of the assembled comparison model.
    """
    base = set(ledger.base_entities)
    deleted_l, deleted_r = set(ledger.left.deleted), set(ledger.right.deleted)
    surv_l, surv_r = base - deleted_l, base - deleted_r
    added_l = {a.entity for a in ledger.left.added}
    added_r = {a.entity for a in ledger.right.added}
    ent_l, ent_r = surv_l | added_l, surv_r | added_r
    common = surv_l & surv_r

    conflicts = set(ledger.conflicts)
    conflict_entities = {e for e, _ in conflicts}
    edits_l = set(ledger.left.attribute_edits) | conflicts
    row4_entities = {e for e, _ in edits_l}
    changed_common = {e for e in row4_entities if e in common}
    row5_entities = changed_common - conflict_entities
    row5_pairs = {(e, p) for e, p in edits_l if e in row5_entities}

    parent_of = {a.entity: a.parent for a in ledger.left.added}
    row8 = {e for e in added_l if parent_of[e] in base}
    row9 = {e for e in row8 if parent_of[e] in ent_r}

    rels11 = {r for r in ledger.left.relations_added
              if r[0] in added_l and r[2] in base}
    rels12 = {r for r in rels11 if r[2] in ent_r}
    rels13 = {r for r in ledger.left.relations_added
              if r[0] in base and r[2] in added_l}
    rels14 = {r for r in rels13 if r[0] in ent_r}
    rels15 = {r for r in ledger.left.relations_added
              if r[0] in base and r[2] in base}
    rels16 = {r for r in rels15 if r[0] in ent_r and r[2] in ent_r}
    rels17 = set(ledger.left.relations_deleted)
    rels18 = {r for r in rels17 if r[0] in ent_r and r[2] in ent_r}

    moved_l = {m.entity for m in ledger.left.moved}
    moved_r = {m.entity for m in ledger.right.moved}
    dest_l = {m.entity: m.new_parent for m in ledger.left.moved}
    dest_r = {m.entity: m.new_parent for m in ledger.right.moved}
    row20 = {e for e in moved_l if e in surv_r and e not in moved_r}
    row21 = {e for e in moved_l & moved_r if dest_l[e] != dest_r[e]}

    def src_count(rels):
        return len({r[0] for r in rels})

    rows = [
        CatalogRow(1, ROW_DESCRIPTIONS[1], entities=len(ent_l)),
        CatalogRow(2, ROW_DESCRIPTIONS[2], entities=len(ent_r)),
        CatalogRow(3, ROW_DESCRIPTIONS[3], entities=len(common)),
        CatalogRow(4, ROW_DESCRIPTIONS[4], entities=len(row4_entities),
                   attributes=len(edits_l)),
        CatalogRow(5, ROW_DESCRIPTIONS[5], entities=len(row5_entities),
                   attributes=len(row5_pairs)),
        CatalogRow(6, ROW_DESCRIPTIONS[6], entities=len(conflict_entities),
                   attributes=len(conflicts)),
        CatalogRow(7, ROW_DESCRIPTIONS[7], entities=len(added_l)),
        CatalogRow(8, ROW_DESCRIPTIONS[8], entities=len(row8)),
        CatalogRow(9, ROW_DESCRIPTIONS[9], entities=len(row9)),
        CatalogRow(10, ROW_DESCRIPTIONS[10], entities=len(deleted_l & surv_r)),
        CatalogRow(11, ROW_DESCRIPTIONS[11], entities=src_count(rels11),
                   relations=len(rels11)),
        CatalogRow(12, ROW_DESCRIPTIONS[12], entities=src_count(rels12),
                   relations=len(rels12)),
        CatalogRow(13, ROW_DESCRIPTIONS[13], entities=src_count(rels13),
                   relations=len(rels13)),
        CatalogRow(14, ROW_DESCRIPTIONS[14], entities=src_count(rels14),
                   relations=len(rels14)),
        CatalogRow(15, ROW_DESCRIPTIONS[15], relations=len(rels15)),
        CatalogRow(16, ROW_DESCRIPTIONS[16], relations=len(rels16)),
        CatalogRow(17, ROW_DESCRIPTIONS[17], relations=len(rels17)),
        CatalogRow(18, ROW_DESCRIPTIONS[18], relations=len(rels18)),
        CatalogRow(19, ROW_DESCRIPTIONS[19], entities=len(moved_l)),
        CatalogRow(20, ROW_DESCRIPTIONS[20], entities=len(row20)),
        CatalogRow(21, ROW_DESCRIPTIONS[21], entities=len(row21)),
    ]
    return CatalogReport(rows=rows, diagnostics=[])
