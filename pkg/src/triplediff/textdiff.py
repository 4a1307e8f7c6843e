"""LCS-based comparison of text at line and word granularity.

The matcher computes a longest common subsequence of two token
sequences. Below a size threshold it uses the full dynamic-programming
table and resolves ties so the match positions in the first sequence are
lexicographically smallest, which makes the output unique. Above the
threshold it falls back to anchor-based splitting (tokens unique in both
sequences) and a linear-space divide and conquer; results there are
still deterministic and maximal but the tie-break rule is not
guaranteed.
"""

from __future__ import annotations

from array import array
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Sequence

# Full-matrix reconstruction is used while len(a) * len(b) stays at or
# under this many cells.
MATRIX_CELL_LIMIT = 4_000_000

EQUAL = "equal"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class DiffHunk:
    op: str  # "equal" | "insert" | "delete"
    tokens: tuple[str, ...]
    a_start: int
    b_start: int


def tokenize(text: str, mode: str) -> list[str]:
    """Split text into tokens.

    ``line`` splits on LF and strips a trailing CR from each line;
    ``word`` splits on maximal whitespace runs, discarding the
    whitespace. Empty text yields no tokens.
    """
    if mode == "word":
        return text.split()
    if mode == "line":
        if not text:
            return []
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        return [line[:-1] if line.endswith("\r") else line for line in lines]
    raise ValueError(f"unknown tokenize mode {mode!r}")


def lcs(a: Sequence[str], b: Sequence[str]) -> list[str]:
    """A longest common subsequence of the two token sequences."""
    return [a[i] for i, _ in _match_positions(a, b)]


def diff_tokens(a: Sequence[str], b: Sequence[str]) -> list[DiffHunk]:
    """Diff two token sequences into equal/delete/insert hunks.

    Concatenating the tokens of equal and delete hunks in order rebuilds
    ``a``; equal and insert hunks rebuild ``b``.
    """
    matches = _match_positions(a, b)
    hunks: list[DiffHunk] = []
    ai = bi = 0
    idx = 0
    while idx < len(matches):
        i, j = matches[idx]
        if i > ai:
            hunks.append(DiffHunk(DELETE, tuple(a[ai:i]), ai, bi))
        if j > bi:
            hunks.append(DiffHunk(INSERT, tuple(b[bi:j]), i, bi))
        run = 1
        while (idx + run < len(matches)
               and matches[idx + run] == (i + run, j + run)):
            run += 1
        hunks.append(DiffHunk(EQUAL, tuple(a[i:i + run]), i, j))
        ai, bi = i + run, j + run
        idx += run
    if ai < len(a):
        hunks.append(DiffHunk(DELETE, tuple(a[ai:]), ai, bi))
    if bi < len(b):
        hunks.append(DiffHunk(INSERT, tuple(b[bi:]), len(a), bi))
    return hunks


def _match_positions(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    n, m = len(a), len(b)
    lo = 0
    while lo < n and lo < m and a[lo] == b[lo]:
        lo += 1
    matches = [(k, k) for k in range(lo)]
    rest_a, rest_b = a[lo:], b[lo:]
    if len(rest_a) * len(rest_b) <= MATRIX_CELL_LIMIT:
        core = _match_exact(rest_a, rest_b)
    else:
        core = _match_large(rest_a, rest_b)
    matches.extend((i + lo, j + lo) for i, j in core)
    return matches


def _suffix_table(a: Sequence[str], b: Sequence[str]) -> list[array]:
    # table[i][j] = LCS length of a[i:] and b[j:]
    n, m = len(a), len(b)
    zero_row = [0] * (m + 1)
    table = [array("i", zero_row) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = table[i]
        nxt = table[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                down = nxt[j]
                right = row[j + 1]
                row[j] = down if down >= right else right
    return table

def _match_exact(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    if not a or not b:
        return []
    table = _suffix_table(a, b)
    positions: dict[str, list[int]] = {}
    for j, tok in enumerate(b):
        positions.setdefault(tok, []).append(j)
    matches: list[tuple[int, int]] = []
    i = j = 0
    n, m = len(a), len(b)
    while i < n and j < m and table[i][j] > 0:
        target = table[i][j]
        cand = positions.get(a[i])
        matched = False
        if cand:
            # table[i+1][k+1] is non-increasing in k, so only the first
            # occurrence of a[i] at or after j can reach the target.
            pos = bisect_left(cand, j)
            if pos < len(cand):
                k = cand[pos]
                if 1 + table[i + 1][k + 1] == target:
                    matches.append((i, k))
                    i += 1
                    j = k + 1
                    matched = True
        if not matched:
            i += 1
    return matches


def _match_large(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    # Trim the common suffix (cheap, loses only the tie-break guarantee),
    # then split on unique anchors, then divide and conquer.
    n, m = len(a), len(b)
    hi = 0
    while hi < n and hi < m and a[n - 1 - hi] == b[m - 1 - hi]:
        hi += 1
    core_a, core_b = a[:n - hi], b[:m - hi]
    matches = _match_core(core_a, core_b)
    matches.extend((n - hi + k, m - hi + k) for k in range(hi))
    return matches


def _match_core(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    if not a or not b:
        return []
    if len(a) * len(b) <= MATRIX_CELL_LIMIT:
        return _match_exact(a, b)
    anchors = _anchor_chain(a, b)
    if anchors:
        out: list[tuple[int, int]] = []
        pa = pb = 0
        for i, j in anchors:
            out.extend((x + pa, y + pb) for x, y in _match_core(a[pa:i], b[pb:j]))
            out.append((i, j))
            pa, pb = i + 1, j + 1
        out.extend((x + pa, y + pb) for x, y in _match_core(a[pa:], b[pb:]))
        return out
    return _match_split(a, b)


def _anchor_chain(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    """Longest chain of tokens that occur exactly once in both sequences."""
    count_a: dict[str, int] = {}
    pos_a: dict[str, int] = {}
    for i, tok in enumerate(a):
        count_a[tok] = count_a.get(tok, 0) + 1
        pos_a[tok] = i
    count_b: dict[str, int] = {}
    pos_b: dict[str, int] = {}
    for j, tok in enumerate(b):
        count_b[tok] = count_b.get(tok, 0) + 1
        pos_b[tok] = j
    pairs = sorted(
        (pos_a[tok], pos_b[tok])
        for tok, ca in count_a.items()
        if ca == 1 and count_b.get(tok) == 1
    )
    if not pairs:
        return []
    # Longest strictly increasing subsequence over the b positions.
    tails: list[int] = []  # last b value per chain length
    tail_pairs: list[tuple[int, int]] = []
    back: dict[tuple[int, int], tuple[int, int] | None] = {}
    for pair in pairs:
        _, j = pair
        k = bisect_left(tails, j)
        back[pair] = tail_pairs[k - 1] if k > 0 else None
        if k == len(tails):
            tails.append(j)
            tail_pairs.append(pair)
        else:
            tails[k] = j
            tail_pairs[k] = pair
    chain: list[tuple[int, int]] = []
    node: tuple[int, int] | None = tail_pairs[-1]
    while node is not None:
        chain.append(node)
        node = back[node]
    chain.reverse()
    return chain


def _lcs_row(a: Sequence[str], b: Sequence[str]) -> array:
    # row[j] = LCS length of a and b[:j]
    m = len(b)
    prev = array("i", [0] * (m + 1))
    cur = array("i", [0] * (m + 1))
    for tok in a:
        cur[0] = 0
        for j in range(1, m + 1):
            if tok == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                up = prev[j]
                left = cur[j - 1]
                cur[j] = up if up >= left else left
        prev, cur = cur, prev
    return prev


def _match_split(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    # Hirschberg-style split: linear space, O(n*m) time.
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    if n == 1 or n * m <= MATRIX_CELL_LIMIT:
        return _match_exact(a, b)
    mid = n // 2
    forward = _lcs_row(a[:mid], b)
    backward = _lcs_row(a[mid:][::-1], b[::-1])
    best_j, best = 0, -1
    for j in range(m + 1):
        v = forward[j] + backward[m - j]
        if v > best:
            best, best_j = v, j
    left = _match_split(a[:mid], b[:best_j])
    right = _match_split(a[mid:], b[best_j:])
    left.extend((i + mid, j + best_j) for i, j in right)
    return left


def render_inline(hunks: list[DiffHunk]) -> str:
    """Word-mode rendering: ``[-deleted-]`` and ``{+inserted+}`` markers."""
    parts = []
    for h in hunks:
        text = " ".join(h.tokens)
        if h.op == EQUAL:
            parts.append(text)
        elif h.op == DELETE:
            parts.append(f"[-{text}-]")
        else:
            parts.append(f"{{+{text}+}}")
    return " ".join(parts)


def render_unified(hunks: list[DiffHunk], a_name: str = "a", b_name: str = "b",
                   context: int = 3) -> str:
    """Line-mode rendering in a unified-diff style.

    Returns the empty string when the inputs are equal.
    """
    events: list[tuple[str, str]] = []
    for h in hunks:
        tag = {EQUAL: " ", DELETE: "-", INSERT: "+"}[h.op]
        for tok in h.tokens:
            events.append((tag, tok))
    change_idx = [k for k, (tag, _) in enumerate(events) if tag != " "]
    if not change_idx:
        return ""

    # Line numbers in a and b before each event.
    a_no = [0] * (len(events) + 1)
    b_no = [0] * (len(events) + 1)
    for k, (tag, _) in enumerate(events):
        a_no[k + 1] = a_no[k] + (1 if tag in (" ", "-") else 0)
        b_no[k + 1] = b_no[k] + (1 if tag in (" ", "+") else 0)

    groups: list[tuple[int, int]] = []
    start = max(0, change_idx[0] - context)
    end = change_idx[0] + 1
    for k in change_idx[1:]:
        if k - end <= 2 * context:
            end = k + 1
        else:
            groups.append((start, min(len(events), end + context)))
            start = max(0, k - context)
            end = k + 1
    groups.append((start, min(len(events), end + context)))

    out = [f"--- {a_name}", f"+++ {b_name}"]
    for start, end in groups:
        a_len = sum(1 for tag, _ in events[start:end] if tag in (" ", "-"))
        b_len = sum(1 for tag, _ in events[start:end] if tag in (" ", "+"))
        a_from = a_no[start] + 1 if a_len else a_no[start]
        b_from = b_no[start] + 1 if b_len else b_no[start]
        out.append(f"@@ -{a_from},{a_len} +{b_from},{b_len} @@")
        out.extend(tag + tok for tag, tok in events[start:end])
    return "\n".join(out) + "\n"


def render_word_diff(a_text: str, b_text: str) -> str:
    """Inline word diff of two texts.

    Large inputs are diffed line-first, with the word-level pass applied
    only inside changed line runs, keeping the matrix small.
    """
    words_a = tokenize(a_text, "word")
    words_b = tokenize(b_text, "word")
    if len(words_a) * len(words_b) <= MATRIX_CELL_LIMIT:
        return render_inline(diff_tokens(words_a, words_b))

    lines_a = tokenize(a_text, "line")
    lines_b = tokenize(b_text, "line")
    out: list[str] = []
    pending_delete: list[str] = []

    def flush(inserted: list[str]) -> None:
        if pending_delete or inserted:
            wa = " ".join(pending_delete).split()
            wb = " ".join(inserted).split()
            out.append(render_inline(diff_tokens(wa, wb)))
            pending_delete.clear()

    for h in diff_tokens(lines_a, lines_b):
        if h.op == EQUAL:
            flush([])
            out.extend(h.tokens)
        elif h.op == DELETE:
            flush([])
            pending_delete.extend(h.tokens)
        else:
            flush(list(h.tokens))
    flush([])
    return "\n".join(out)
