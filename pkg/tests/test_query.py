import random

import pytest

from helpers import brute_force_evaluate, random_comparison, random_query
from triplediff.compare import UnknownLabelError, build_comparison
from triplediff.query import (
    CountProjection,
    Filter,
    NotExists,
    QuerySemanticError,
    QuerySyntaxError,
    TriplePattern,
    evaluate,
    parse_query,
    relabel_query,
)
from triplediff.triples import ModelGraph, Statement, iri, literal


def stmt(s, p, o):
    return Statement(iri(s), iri(p), o)


def table_rows(table):
    return [tuple(t.value for t in row) for row in table.rows]


@pytest.fixture
def name_change():
    old = ModelGraph([stmt("e:a1", "a:Name", literal("Design"))])
    new = ModelGraph([stmt("e:a1", "a:Name", literal("System Design"))])
    return build_comparison([("base", old), ("std", new)])


class TestParse:
    def test_minimal_query(self):
        q = parse_query('SELECT ?e WHERE { ?e <m:type> "Activity" @[+std] . }')
        assert len(q.clauses) == 1
        pattern = q.clauses[0]
        assert isinstance(pattern, TriplePattern)
        assert len(pattern.origins) == 1
        assert pattern.origins[0].label == "std"
        assert pattern.origins[0].required

    def test_count_projection(self):
        q = parse_query("SELECT COUNT(DISTINCT ?e) WHERE { ?e <m:type> ?t . }")
        assert isinstance(q.projection, CountProjection)
        assert q.projection.distinct

    def test_unbound_projection_is_semantic_error(self):
        with pytest.raises(QuerySemanticError, match=r"\?e"):
            parse_query('SELECT ?e WHERE { FILTER ?x = "y" }')

    def test_filter_before_binding_is_semantic_error(self):
        with pytest.raises(QuerySemanticError, match="before"):
            parse_query('SELECT ?e WHERE { FILTER ?e = "y" ?e <m:type> ?t . }')

    def test_syntax_error_reports_location(self):
        with pytest.raises(QuerySyntaxError) as exc:
            parse_query("SELECT ?e WHERE {\n  ?e <m:type> }")
        assert exc.value.line == 2

    def test_literal_subject_rejected(self):
        with pytest.raises(QuerySyntaxError, match="subject"):
            parse_query('SELECT ?e WHERE { "x" <a:n> ?e . }')

    def test_comments_and_unicode_operators(self):
        q = parse_query(
            "# heading comment\n"
            "SELECT ?v WHERE {\n"
            "  ?e <a:n> ?v .  # trailing comment\n"
            '  FILTER ?v ≠ "x"\n'
            '  FILTER ?v ≤ "zz"\n'
            "}\n")
        ops = [c.op for c in q.clauses if isinstance(c, Filter)]
        assert ops == ["!=", "<="]

    def test_not_exists_nesting(self):
        q = parse_query(
            "SELECT ?e WHERE { ?e <m:type> ?t . "
            "NOT EXISTS { NOT EXISTS { ?e <a:n> ?v . } } }")
        outer = q.clauses[1]
        assert isinstance(outer, NotExists)
        assert isinstance(outer.clauses[0], NotExists)

    def test_missing_dot_rejected(self):
        with pytest.raises(QuerySyntaxError):
            parse_query("SELECT ?e WHERE { ?e <m:type> ?t }")


class TestEvaluate:
    def test_value_only_in_old_version(self, name_change):
        q = parse_query('SELECT ?v WHERE { <e:a1> <a:Name> ?v @[+base,-std] . }')
        assert table_rows(evaluate(name_change, q)) == [("Design",)]

    def test_value_only_in_new_version(self, name_change):
        q = parse_query('SELECT ?v WHERE { <e:a1> <a:Name> ?v @[+std,-base] . }')
        assert table_rows(evaluate(name_change, q)) == [("System Design",)]

    def test_unknown_label_raises(self, name_change):
        q = parse_query('SELECT ?v WHERE { ?e <a:Name> ?v @[+nope] . }')
        with pytest.raises(UnknownLabelError):
            evaluate(name_change, q)

    def test_join_and_filter(self):
        c = build_comparison([
            ("A", ModelGraph([stmt("e:1", "m:type", literal("T")),
                              stmt("e:1", "a:n", literal("x")),
                              stmt("e:2", "m:type", literal("T")),
                              stmt("e:2", "a:n", literal("y"))])),
            ("B", ModelGraph()),
        ])
        q = parse_query(
            'SELECT ?e WHERE { ?e <m:type> "T" . ?e <a:n> ?v . FILTER ?v != "x" }')
        assert table_rows(evaluate(c, q)) == [("e:2",)]

    def test_filter_compares_values_ignoring_kind(self):
        c = build_comparison([
            ("A", ModelGraph([stmt("e:1", "a:n", literal("v")),
                              stmt("e:1", "r:x", iri("e:2"))])),
            ("B", ModelGraph()),
        ])
        q = parse_query(
            'SELECT ?p WHERE { <e:1> ?p ?v . FILTER ?p >= "r:" FILTER ?p < "r;" }')
        assert table_rows(evaluate(c, q)) == [("r:x",)]

    def test_not_exists_blocks_rows(self):
        c = build_comparison([
            ("A", ModelGraph([stmt("e:1", "m:type", literal("T")),
                              stmt("e:2", "m:type", literal("T"))])),
            ("B", ModelGraph([stmt("e:1", "m:type", literal("T"))])),
        ])
        q = parse_query(
            "SELECT ?e WHERE { ?e <m:type> ?t @[+A] . "
            "NOT EXISTS { ?e <m:type> ?u @[+B] . } }")
        assert table_rows(evaluate(c, q)) == [("e:2",)]

    def test_count_and_distinct(self):
        c = build_comparison([
            ("A", ModelGraph([stmt("e:1", "a:n", literal("x")),
                              stmt("e:1", "a:m", literal("x")),
                              stmt("e:2", "a:n", literal("y"))])),
            ("B", ModelGraph()),
        ])
        count_all = parse_query("SELECT COUNT(?e) WHERE { ?e ?p ?v . }")
        assert table_rows(evaluate(c, count_all)) == [("3",)]
        count_distinct = parse_query("SELECT COUNT(DISTINCT ?e) WHERE { ?e ?p ?v . }")
        assert table_rows(evaluate(c, count_distinct)) == [("2",)]
        plain = parse_query("SELECT ?e WHERE { ?e ?p ?v . }")
        assert len(evaluate(c, plain).rows) == 3
        distinct = parse_query("SELECT DISTINCT ?e WHERE { ?e ?p ?v . }")
        assert len(evaluate(c, distinct).rows) == 2

    def test_rows_are_sorted_and_rendering_is_stable(self):
        c = build_comparison([
            ("A", ModelGraph([stmt("e:b", "a:n", literal("2")),
                              stmt("e:a", "a:n", literal("1"))])),
            ("B", ModelGraph()),
        ])
        q = parse_query("SELECT ?e ?v WHERE { ?e <a:n> ?v . }")
        first = evaluate(c, q)
        second = evaluate(c, q)
        assert first.format_csv() == second.format_csv()
        assert table_rows(first) == [("e:a", "1"), ("e:b", "2")]


def test_relabel_query():
    q = parse_query('SELECT ?e WHERE { ?e <m:type> ?t @[+left,-base] . '
                    'NOT EXISTS { ?e <a:n> ?v @[+right] . } }')
    relabeled = relabel_query(q, {"left": "v12", "base": "v11", "right": "tail"})
    pattern = relabeled.clauses[0]
    assert [c.label for c in pattern.origins] == ["v12", "v11"]
    inner = relabeled.clauses[1].clauses[0]
    assert inner.origins[0].label == "tail"


def test_oracle_equivalence_sample():
    rnd = random.Random(20240809)
    for _ in range(200):
        comparison = random_comparison(rnd)
        query = random_query(rnd, comparison)
        expected = brute_force_evaluate(comparison, query)
        table = evaluate(comparison, query)
        if expected[0] == "count":
            assert table.columns == ("count",)
            assert table.rows[0][0].value == str(expected[1])
        else:
            assert table.columns == expected[0]
            assert list(table.rows) == expected[1]


def test_origin_constraint_monotonicity():
    from dataclasses import replace

    from triplediff.query import OriginConstraint

    rnd = random.Random(99)
    for _ in range(80):
        comparison = random_comparison(rnd)
        query = random_query(rnd, comparison)
        if isinstance(query.projection, CountProjection):
            continue
        patterns = [k for k, c in enumerate(query.clauses)
                    if isinstance(c, TriplePattern)]
        if not patterns:
            continue
        k = rnd.choice(patterns)
        label = rnd.choice(comparison.labels)
        required = rnd.random() < 0.5
        pattern = query.clauses[k]
        tightened = replace(
            pattern, origins=pattern.origins + (OriginConstraint(label, required),))
        clauses = list(query.clauses)
        clauses[k] = tightened
        tightened_query = replace(query, clauses=tuple(clauses))

        from collections import Counter

        base_rows = Counter(evaluate(comparison, query).rows)
        new_rows = Counter(evaluate(comparison, tightened_query).rows)
        assert all(new_rows[row] <= base_rows[row] for row in new_rows)
