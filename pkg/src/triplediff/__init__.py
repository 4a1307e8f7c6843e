"""Triple-based structured model differencing.

Normalize identifier-bearing models into statement sets, combine them
into origin-tagged comparison models, query the combined model for
change patterns, run the 21-row three-way change analysis, and inspect
changed texts with an LCS word diff.
"""

from .catalog import CatalogReport, RoleBinding, run_catalog
from .compare import (
    ComparisonModel,
    build_comparison,
    export_reified,
    parse_comparison,
    project_origin,
    serialize_comparison,
)
from .fixtures import ChangeLedger, FixtureSpec, generate_fixture, report_from_ledger
from .ingest import IngestReport, ingest_xml
from .query import BindingTable, evaluate, parse_query
from .textdiff import DiffHunk, diff_tokens, lcs, tokenize
from .triples import (
    ModelGraph,
    Statement,
    Term,
    iri,
    literal,
    parse_graph,
    serialize_graph,
    statement_order,
)

__version__ = "0.1.0"

__all__ = [
    "BindingTable",
    "CatalogReport",
    "ChangeLedger",
    "ComparisonModel",
    "DiffHunk",
    "FixtureSpec",
    "IngestReport",
    "ModelGraph",
    "RoleBinding",
    "Statement",
    "Term",
    "build_comparison",
    "diff_tokens",
    "evaluate",
    "export_reified",
    "generate_fixture",
    "ingest_xml",
    "iri",
    "lcs",
    "literal",
    "parse_comparison",
    "parse_graph",
    "parse_query",
    "project_origin",
    "report_from_ledger",
    "run_catalog",
    "serialize_comparison",
    "serialize_graph",
    "statement_order",
    "tokenize",
]
