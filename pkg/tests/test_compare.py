import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplediff.compare import (
    ComparisonError,
    DuplicateLabelError,
    UnknownLabelError,
    build_comparison,
    export_reified,
    parse_comparison,
    project_origin,
    serialize_comparison,
)
from triplediff.triples import ModelGraph, Statement, iri, literal, parse_graph


def stmt(s, p, o):
    return Statement(iri(s), iri(p), o)


S1 = stmt("e:a", "a:n", literal("1"))
S2 = stmt("e:b", "a:n", literal("2"))
S3 = stmt("e:c", "a:n", literal("3"))


def test_union_with_origin_sets():
    c = build_comparison([("A", ModelGraph([S1, S2])), ("B", ModelGraph([S2, S3]))])
    assert len(c) == 3
    assert c.origin(S1) == frozenset({"A"})
    assert c.origin(S2) == frozenset({"A", "B"})
    assert c.origin(S3) == frozenset({"B"})


def test_identical_graphs_merge_to_single_entry():
    c = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph([S1]))])
    assert len(c) == 1
    assert c.origin(S1) == frozenset({"A", "B"})


def test_three_way_union_size_matches_brute_force():
    rnd = random.Random(9)
    subjects = [f"e:s{i}" for i in range(12)]
    def random_graph():
        return ModelGraph(
            stmt(rnd.choice(subjects), "a:n", literal(str(rnd.randint(0, 20))))
            for _ in range(30)
        )
    graphs = [("x", random_graph()), ("y", random_graph()), ("z", random_graph())]
    c = build_comparison(graphs)
    brute_union = set()
    for _, graph in graphs:
        brute_union |= set(graph.statements)
    assert len(c) == len(brute_union)


def test_shared_statements_three_ways():
    shared = [stmt(f"e:shared{i}", "a:n", literal("s")) for i in range(4)]
    def mk(prefix):
        own = [stmt(f"e:{prefix}{i}", "a:n", literal(prefix)) for i in range(6)]
        return ModelGraph(shared + own)
    c = build_comparison([("x", mk("x")), ("y", mk("y")), ("z", mk("z"))])
    assert len(c) == 4 + 18


def test_projection_recovers_inputs():
    a, b = ModelGraph([S1, S2]), ModelGraph([S2, S3])
    c = build_comparison([("A", a), ("B", b)])
    assert project_origin(c, "A") == a
    assert project_origin(c, "B") == b


def test_projection_unknown_label():
    c = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph())])
    with pytest.raises(UnknownLabelError):
        project_origin(c, "C")


def test_empty_input_graph_projects_empty():
    c = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph())])
    assert len(project_origin(c, "B")) == 0


def test_errors():
    with pytest.raises(ComparisonError):
        build_comparison([("A", ModelGraph())])
    with pytest.raises(DuplicateLabelError):
        build_comparison([("A", ModelGraph()), ("A", ModelGraph())])
    with pytest.raises(ComparisonError):
        build_comparison([("A", ModelGraph()), ("bad label", ModelGraph())])


def test_reified_statement_counts():
    c = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph())])
    assert len(export_reified(c)) == 4  # subject, predicate, object, one origin
    c2 = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph([S1]))])
    assert len(export_reified(c2)) == 5  # two origins


def test_reified_full_recount():
    c = build_comparison([
        ("A", ModelGraph([S1, S2])),
        ("B", ModelGraph([S2, S3])),
        ("C", ModelGraph([S3])),
    ])
    expected = sum(3 + len(origins) for _, origins in c.entries())
    assert len(export_reified(c)) == expected


def _comparison_from_reified(graph):
    """Inverse reader for reified graphs (test helper)."""
    nodes = {}
    for statement in graph.statements:
        record = nodes.setdefault(statement.subject.value, {"labels": set()})
        pred = statement.predicate.value
        if pred == "m:inModel":
            record["labels"].add(statement.obj.value)
        else:
            record[pred] = statement.obj
    entries = {}
    labels = set()
    for record in nodes.values():
        entry = Statement(record["m:subject"], record["m:predicate"],
                          record["m:object"])
        entries[entry] = frozenset(record["labels"])
        labels |= record["labels"]
    return sorted(labels), entries


def test_reified_graph_reconstructs_comparison():
    c = build_comparison([("A", ModelGraph([S1, S2])), ("B", ModelGraph([S2, S3]))])
    labels, entries = _comparison_from_reified(export_reified(c))
    assert labels == sorted(c.labels)
    assert entries == {s: o for s, o in c.entries()}


def test_ntc_round_trip():
    c = build_comparison([("base", ModelGraph([S1, S2])), ("tail", ModelGraph([S2]))])
    text = serialize_comparison(c)
    assert '<e:b> <a:n> "2" @ base,tail' in text.splitlines()
    again = parse_comparison(text)
    assert {s: o for s, o in again.entries()} == {s: o for s, o in c.entries()}
    assert set(again.labels) == {"base", "tail"}


def test_ntc_rejects_garbage():
    from triplediff.triples import ParseError

    with pytest.raises(ParseError, match="line 1"):
        parse_comparison('<e:a> <a:n> "1"\n')  # missing origin list
    with pytest.raises(ParseError):
        parse_comparison('<e:a> <a:n> "1" @ \n')


iri_values = st.text(
    alphabet=st.characters(blacklist_characters=' <>"\n\t',
                           blacklist_categories=("Cs",)),
    min_size=1, max_size=8)
statements = st.builds(
    Statement, iri_values.map(iri), iri_values.map(iri),
    st.one_of(iri_values.map(iri), st.text(max_size=12).map(literal)))
graph_strategy = st.lists(statements, max_size=15).map(ModelGraph)


@given(graph_strategy, graph_strategy, graph_strategy)
def test_projection_round_trip_property(a, b, c):
    comparison = build_comparison([("ga", a), ("gb", b), ("gc", c)])
    assert project_origin(comparison, "ga") == a
    assert project_origin(comparison, "gb") == b
    assert project_origin(comparison, "gc") == c
    union = set(a.statements) | set(b.statements) | set(c.statements)
    assert len(comparison) == len(union)


@given(graph_strategy, graph_strategy)
def test_ntc_round_trip_property(a, b):
    comparison = build_comparison([("x", a), ("y", b)])
    again = parse_comparison(serialize_comparison(comparison))
    assert {s: o for s, o in again.entries()} == {s: o for s, o in comparison.entries()}


def test_serialized_comparison_can_be_parsed_as_plain_graph_after_reify():
    c = build_comparison([("A", ModelGraph([S1])), ("B", ModelGraph([S2]))])
    reified = export_reified(c)
    from triplediff.triples import serialize_graph

    assert parse_graph(serialize_graph(reified)) == reified
