"""Shared plain-text table rendering."""

from __future__ import annotations


def format_aligned_table(header: list[str], rows: list[list[str]],
                         right_align: set[int] | None = None) -> str:
    """Render rows as an aligned text table with a header separator.

    Column indexes in ``right_align`` are padded on the left (useful for
    numeric columns). Returns text ending with a newline.
    """
    right_align = right_align or set()
    widths = [len(h) for h in header]
    for row in rows:
        for k, cell in enumerate(row):
            widths[k] = max(widths[k], len(cell))

    def fmt(cells: list[str]) -> str:
        parts = []
        for k, cell in enumerate(cells):
            if k in right_align:
                parts.append(cell.rjust(widths[k]))
            else:
                parts.append(cell.ljust(widths[k]))
        return "  ".join(parts).rstrip()

    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"
