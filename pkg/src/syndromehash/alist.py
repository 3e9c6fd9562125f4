"""MacKay alist text format.

Layout::

    n r
    max_col_weight max_row_weight
    <n column weights>
    <r row weights>
    <n lines: 1-based row indices per column, zero-padded to max_col_weight>
    <r lines: 1-based column indices per row, zero-padded to max_row_weight>

Zero padding is optional when reading.
"""

from __future__ import annotations

import hashlib

from .matrix import SparseParityCheck


class AlistError(ValueError):
    pass


def _padded(values, width: int) -> str:
    vals = [str(v + 1) for v in values] + ["0"] * (width - len(values))
    return " ".join(vals)


def alist_write(h: SparseParityCheck) -> str:
    cw = h.col_weights()
    rw = h.row_weights()
    max_c = int(cw.max()) if h.n else 0
    max_r = int(rw.max()) if h.r else 0
    lines = [
        f"{h.n} {h.r}",
        f"{max_c} {max_r}",
        " ".join(map(str, cw.tolist())),
        " ".join(map(str, rw.tolist())),
    ]
    # an all-zero matrix still needs one placeholder per line, or the line would vanish
    lines.extend(_padded(h.col(i).tolist(), max(max_c, 1)) for i in range(h.n))
    lines.extend(_padded(h.row(j).tolist(), max(max_r, 1)) for j in range(h.r))
    return "\n".join(lines) + "\n"


def _ints(line: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise AlistError(f"non-integer token in {what}") from None


def alist_read(text: str) -> SparseParityCheck:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistError("truncated header")
    head = _ints(lines[0], "header")
    if len(head) != 2:
        raise AlistError("malformed header: expected 'n r'")
    n, r = head
    if n <= 0 or r <= 0:
        raise AlistError("malformed header: n and r must be positive")
    maxes = _ints(lines[1], "header")
    if len(maxes) != 2:
        raise AlistError("malformed header: expected 'max_col_weight max_row_weight'")
    max_c, max_r = maxes
    cw = _ints(lines[2], "column weights")
    rw = _ints(lines[3], "row weights")
    if len(cw) != n or len(rw) != r:
        raise AlistError("weight line lengths do not match n and r")
    if (cw and max(cw) > max_c) or (rw and max(rw) > max_r):
        raise AlistError("weight exceeds declared maximum")
    if len(lines) != 4 + n + r:
        raise AlistError(f"expected {4 + n + r} non-empty lines, found {len(lines)}")

    col_edges = set()
    for i in range(n):
        idx = [v for v in _ints(lines[4 + i], f"column {i + 1}") if v != 0]
        if len(idx) != cw[i]:
            raise AlistError(f"column {i + 1} lists {len(idx)} entries, weight says {cw[i]}")
        for v in idx:
            if not 1 <= v <= r:
                raise AlistError(f"row index {v} out of range in column {i + 1}")
            if (v - 1, i) in col_edges:
                raise AlistError(f"duplicate entry in column {i + 1}")
            col_edges.add((v - 1, i))

    row_edges = set()
    for j in range(r):
        idx = [v for v in _ints(lines[4 + n + j], f"row {j + 1}") if v != 0]
        if len(idx) != rw[j]:
            raise AlistError(f"row {j + 1} lists {len(idx)} entries, weight says {rw[j]}")
        for v in idx:
            if not 1 <= v <= n:
                raise AlistError(f"column index {v} out of range in row {j + 1}")
            if (j, v - 1) in row_edges:
                raise AlistError(f"duplicate entry in row {j + 1}")
            row_edges.add((j, v - 1))

    if col_edges != row_edges:
        raise AlistError("column and row sections describe different matrices")
    edges = sorted(row_edges)
    try:
        return SparseParityCheck.from_edges(n, r, [e[0] for e in edges], [e[1] for e in edges])
    except ValueError as exc:
        raise AlistError(str(exc)) from None


def code_id(h: SparseParityCheck) -> str:
    """Stable identifier: truncated SHA-256 of the canonical alist text."""
    return "alist-sha256:" + hashlib.sha256(alist_write(h).encode()).hexdigest()[:16]
