"""Command line interface: files in, files or stdout out.

Exit codes: 0 success, 1 integrity or validation failure, 2 usage or
parse error, 3 I/O error. Every command is deterministic: identical
inputs and flags produce byte-identical output.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import catalog, compare, fixtures, ingest, query, textdiff, triples

EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc}")
    except UnicodeDecodeError as exc:
        _fail(EXIT_USAGE, f"{path} is not valid UTF-8: {exc}")


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _load_comparison(path: str) -> compare.ComparisonModel:
    data = _read_bytes(path)
    try:
        return compare.parse_comparison(data)
    except triples.ParseError as exc:
        _fail(EXIT_USAGE, f"{path}: {exc}")


format_option = click.option(
    "--format", "fmt", type=click.Choice(["table", "csv", "json"]),
    default="table", show_default=True, help="Output rendering.")


@click.group()
@click.version_option(package_name="triplediff")
def main():
    """Normalize models to triples, compare them, query the changes."""


@main.command("ingest")
@click.argument("xml_path")
@click.option("-o", "--output", required=True, help="Output .nt3 path.")
@click.option("--id-attr", default="id", show_default=True)
@click.option("--ref-attr", default="ref", show_default=True)
@click.option("--report", "show_report", is_flag=True,
              help="Print the ingestion report.")
@format_option
def ingest_cmd(xml_path, output, id_attr, ref_attr, show_report, fmt):
    """Convert an identifier-bearing XML file to canonical triples."""
    data = _read_bytes(xml_path)
    try:
        graph, report = ingest.ingest_xml(data, id_attr=id_attr, ref_attr=ref_attr)
    except ingest.XmlSyntaxError as exc:
        _fail(EXIT_USAGE, f"{xml_path}: {exc}")
    except ingest.IngestError as exc:
        _fail(EXIT_VALIDATION, f"{xml_path}: {exc}")
    _write_text(output, triples.serialize_graph(graph))
    if show_report:
        if fmt == "json":
            click.echo(report.format_json(), nl=False)
        else:
            click.echo(report.format_table(), nl=False)


@main.command("compare")
@click.option("-l", "--label", "labeled", multiple=True, required=True,
              metavar="LABEL=FILE", help="A labeled input model (repeatable).")
@click.option("-o", "--output", required=True, help="Output .ntc path.")
def compare_cmd(labeled, output):
    """Build an origin-tagged comparison model from labeled .nt3 files."""
    inputs = []
    for item in labeled:
        label, sep, path = item.partition("=")
        if not sep or not label or not path:
            _fail(EXIT_USAGE, f"expected LABEL=FILE, got {item!r}")
        data = _read_bytes(path)
        try:
            graph = triples.parse_graph(data, label=label)
        except triples.ParseError as exc:
            _fail(EXIT_USAGE, f"{path}: {exc}")
        inputs.append((label, graph))
    try:
        comparison = compare.build_comparison(inputs)
    except compare.ComparisonError as exc:
        _fail(EXIT_USAGE, str(exc))
    _write_text(output, compare.serialize_comparison(comparison))


@main.command("query")
@click.argument("comparison_path")
@click.argument("query_path")
@format_option
def query_cmd(comparison_path, query_path, fmt):
    """Evaluate a .dq query file against a .ntc comparison."""
    comparison = _load_comparison(comparison_path)
    text = _read_text(query_path)
    try:
        parsed = query.parse_query(text)
    except (query.QuerySyntaxError, query.QuerySemanticError) as exc:
        _fail(EXIT_USAGE, f"{query_path}: {exc}")
    try:
        table = query.evaluate(comparison, parsed)
    except compare.UnknownLabelError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if fmt == "json":
        click.echo(json.dumps(table.to_json_dict(), indent=2, ensure_ascii=False))
    elif fmt == "csv":
        click.echo(table.format_csv(), nl=False)
    else:
        click.echo(table.format_table(), nl=False)


@main.command("analyze")
@click.argument("comparison_path")
@click.option("--base", required=True, help="Label of the common ancestor.")
@click.option("--left", required=True, help="Label of the evolved reference.")
@click.option("--right", required=True, help="Label of the edited variant.")
@click.option("--row", "row_number", type=int, default=None,
              help="Compute one row and list its elements.")
@format_option
def analyze_cmd(comparison_path, base, left, right, row_number, fmt):
    """Run the 21-row three-way change analysis."""
    comparison = _load_comparison(comparison_path)
    try:
        roles = catalog.RoleBinding(base=base, left=left, right=right)
        roles.validate(comparison)
    except (ValueError,) as exc:
        _fail(EXIT_USAGE, str(exc))
    try:
        if row_number is None:
            report = catalog.run_catalog(comparison, roles)
            if fmt == "json":
                click.echo(report.format_json(), nl=False)
            elif fmt == "csv":
                click.echo(report.format_csv(), nl=False)
            else:
                click.echo(report.format_table(), nl=False)
            return
        if not 1 <= row_number <= 21:
            _fail(EXIT_USAGE, f"--row must be 1..21, got {row_number}")
        columns, elements = catalog.row_elements(comparison, roles, row_number)
        if fmt == "json":
            payload = {
                "row": row_number,
                "description": catalog.ROW_DESCRIPTIONS[row_number],
                "columns": list(columns),
                "elements": [list(e) for e in elements],
            }
            click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        elif fmt == "csv":
            import csv
            import io

            out = io.StringIO()
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(elements)
            click.echo(out.getvalue(), nl=False)
        else:
            from .render import format_aligned_table

            click.echo(format_aligned_table(list(columns),
                                            [list(e) for e in elements]),
                       nl=False)
    except catalog.IntegrityError as exc:
        _fail(EXIT_VALIDATION, str(exc))


@main.command("textdiff")
@click.argument("a_path")
@click.argument("b_path")
@click.option("--mode", type=click.Choice(["line", "word"]), default="line",
              show_default=True)
def textdiff_cmd(a_path, b_path, mode):
    """Diff two text files at line or word granularity."""
    a_text = _read_text(a_path)
    b_text = _read_text(b_path)
    if mode == "word":
        click.echo(textdiff.render_word_diff(a_text, b_text))
    else:
        hunks = textdiff.diff_tokens(
            textdiff.tokenize(a_text, "line"), textdiff.tokenize(b_text, "line"))
        click.echo(textdiff.render_unified(hunks, a_name=a_path, b_name=b_path),
                   nl=False)


@main.command("export-reified")
@click.argument("comparison_path")
@click.option("-o", "--output", required=True, help="Output .nt3 path.")
def export_reified_cmd(comparison_path, output):
    """Export a comparison as a plain graph of statement nodes."""
    comparison = _load_comparison(comparison_path)
    _write_text(output, triples.serialize_graph(compare.export_reified(comparison)))


@main.command("fixture")
@click.option("--spec", "spec_path", default=None,
              help="Fixture spec JSON; defaults to the paper-scale spec.")
@click.option("-o", "--output", "out_dir", required=True,
              help="Directory for base/left/right.nt3 and ledger.json.")
def fixture_cmd(spec_path, out_dir):
    """Generate a synthetic three-way fixture with its change ledger."""
    if spec_path is None:
        spec = fixtures.PAPER_SCALE
    else:
        raw = _read_text(spec_path)
        try:
            spec = fixtures.FixtureSpec.from_json_dict(json.loads(raw))
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            _fail(EXIT_USAGE, f"{spec_path}: invalid fixture spec: {exc}")
    try:
        spec.validate()
        base, left, right, ledger = fixtures.generate_fixture(spec)
    except fixtures.FixtureError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot create {out_dir}: {exc}")
    _write_text(str(directory / "base.nt3"), triples.serialize_graph(base))
    _write_text(str(directory / "left.nt3"), triples.serialize_graph(left))
    _write_text(str(directory / "right.nt3"), triples.serialize_graph(right))
    _write_text(str(directory / "ledger.json"), ledger.format_json())
    _write_text(str(directory / "spec.json"),
                json.dumps(spec.to_json_dict(), indent=2) + "\n")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("triplediff.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
