"""Deterministic CLI scenario shared by the golden-file tests.

Run this module directly to regenerate tests/golden/ after an intended
output-format change:

    python tests/golden_scenario.py
"""

from __future__ import annotations

from pathlib import Path

from click.testing import CliRunner

from triplediff.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run_cli(args: list[str]) -> str:
    runner = CliRunner()
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, f"{args}: {result.output}"
    return result.output


def run_scenario(workdir: Path) -> dict[str, str]:
    """Run the full CLI pipeline once; returns {golden name: output text}."""
    fx = workdir / "fx"
    comp = workdir / "comp.ntc"
    outputs: dict[str, str] = {}

    run_cli(["fixture", "--spec", str(DATA / "spec_small.json"), "-o", str(fx)])
    for name in ("base.nt3", "left.nt3", "right.nt3", "ledger.json"):
        outputs[f"fixture_{name}"] = (fx / name).read_text(encoding="utf-8")

    run_cli(["compare", "-l", f"base={fx}/base.nt3", "-l", f"left={fx}/left.nt3",
             "-l", f"right={fx}/right.nt3", "-o", str(comp)])
    outputs["comparison.ntc"] = comp.read_text(encoding="utf-8")

    roles = ["--base", "base", "--left", "left", "--right", "right"]
    outputs["analyze.txt"] = run_cli(["analyze", str(comp), *roles])
    outputs["analyze.csv"] = run_cli(["analyze", str(comp), *roles,
                                      "--format", "csv"])
    outputs["analyze.json"] = run_cli(["analyze", str(comp), *roles,
                                       "--format", "json"])
    outputs["row07.json"] = run_cli(["analyze", str(comp), *roles,
                                     "--row", "7", "--format", "json"])
    outputs["row04.txt"] = run_cli(["analyze", str(comp), *roles, "--row", "4"])

    query_path = DATA / "removed_names.dq"
    outputs["query.txt"] = run_cli(["query", str(comp), str(query_path)])
    outputs["query.csv"] = run_cli(["query", str(comp), str(query_path),
                                    "--format", "csv"])
    outputs["query.json"] = run_cli(["query", str(comp), str(query_path),
                                     "--format", "json"])

    ingested = workdir / "sample.nt3"
    outputs["ingest_report.txt"] = run_cli(
        ["ingest", str(DATA / "sample.xml"), "-o", str(ingested), "--report"])
    outputs["ingest_report.json"] = run_cli(
        ["ingest", str(DATA / "sample.xml"), "-o", str(ingested), "--report",
         "--format", "json"])
    outputs["sample.nt3"] = ingested.read_text(encoding="utf-8")

    reified = workdir / "reified.nt3"
    run_cli(["export-reified", str(comp), "-o", str(reified)])
    outputs["reified_head.nt3"] = "".join(
        reified.read_text(encoding="utf-8").splitlines(keepends=True)[:12])

    outputs["diff_word.txt"] = run_cli(
        ["textdiff", str(DATA / "a.txt"), str(DATA / "b.txt"), "--mode", "word"])
    # Line mode embeds the input paths in the header; rebuild with fixed
    # names so the golden file is location independent.
    for name in ("a.txt", "b.txt"):
        (workdir / name).write_text((DATA / name).read_text(encoding="utf-8"),
                                    encoding="utf-8")
    import os

    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        outputs["diff_line.txt"] = run_cli(["textdiff", "a.txt", "b.txt"])
    finally:
        os.chdir(cwd)
    return outputs


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        outputs = run_scenario(Path(tmp))
    GOLDEN.mkdir(exist_ok=True)
    for name, text in outputs.items():
        (GOLDEN / name).write_text(text, encoding="utf-8")
    print(f"wrote {len(outputs)} golden files to {GOLDEN}")
