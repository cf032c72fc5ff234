"""Pure-Python twins of the compiled kernels in omnilat._speed.

Identical contracts and outputs, no C toolchain required.  omnilat._kernels
selects whichever implementation is importable; OMNILAT_PURE=1 forces this
one.  Squares enter as flat row-major symbol lists.
"""

from __future__ import annotations

import itertools
import time

ACHIEVED = 0
EXHAUSTED = 1
TIMEOUT = 2


def search(
    n: int,
    grid: list[int],
    ell: int,
    forced_rows: int = 0,
    forced_cols: int = 0,
    required_syms: int = 0,
    forbidden: tuple[int, ...] = (),
    preplaced: tuple[tuple[int, int], ...] = (),
    require_maximal: bool = True,
    node_limit: int = -1,
    time_limit: float = -1.0,
    group: list[int] | None = None,
    sum_target: int = -1,
):
    """Row-major DFS for one partial transversal of length ``ell``.

    Rows are processed in ascending order; a row is assigned a free
    (column, symbol) pair with columns tried in ascending index order, or
    skipped while the skip budget n - ell lasts.  Maximality (no free cell
    against the whole square) is decided at length-ell leaves only.  Masks
    narrow the search: forced rows may not be skipped, and when the forced
    column / required symbol sets pin the full length the per-row candidate
    sets shrink to them.  ``group``+``sum_target`` add the abelian
    symbol-sum leaf test.  Returns (status, witness | None, nodes).
    """
    rows = [grid[r * n : (r + 1) * n] for r in range(n)]
    forb = [0] * n
    for cell in forbidden:
        forb[cell // n] |= 1 << (cell % n)

    used_rows = used_cols = used_syms = 0
    csum = 0
    chosen: list[tuple[int, int, int]] = []
    for r, c in preplaced:
        s = rows[r][c]
        if used_rows >> r & 1 or used_cols >> c & 1 or used_syms >> s & 1:
            raise ValueError("preplaced cells clash")
        used_rows |= 1 << r
        used_cols |= 1 << c
        used_syms |= 1 << s
        chosen.append((r, c, s))
        if group is not None:
            csum = group[csum * n + s]
    if len(chosen) > ell:
        raise ValueError("more preplaced cells than the target length")

    avail = [r for r in range(n) if not used_rows >> r & 1]
    m = len(avail)
    max_skips = n - ell
    all_mask = (1 << n) - 1
    col_pool = forced_cols if forced_cols.bit_count() == ell else all_mask
    sym_pool = required_syms if required_syms.bit_count() == ell else all_mask

    deadline = time.monotonic() + time_limit if time_limit > 0 else None
    nodes = 0
    witness: list[tuple[int, int, int]] | None = None

    def leaf(used_rows: int, used_cols: int, used_syms: int, csum: int) -> bool:
        if forced_rows & ~used_rows or forced_cols & ~used_cols:
            return False
        if required_syms & ~used_syms:
            return False
        if sum_target >= 0 and csum != sum_target:
            return False
        if require_maximal:
            free_cols = [c for c in range(n) if not used_cols >> c & 1]
            fr = all_mask & ~used_rows
            while fr:
                r = (fr & -fr).bit_length() - 1
                fr &= fr - 1
                row = rows[r]
                for c in free_cols:
                    if not used_syms >> row[c] & 1:
                        return False
        return True

    def rec(i: int, placed: int, skips: int, ur: int, uc: int, us: int, csum: int) -> int:
        nonlocal nodes, witness
        nodes += 1
        if node_limit >= 0 and nodes > node_limit:
            return TIMEOUT
        if deadline is not None and nodes & 2047 == 0 and time.monotonic() > deadline:
            return TIMEOUT
        if placed == ell:
            for k in range(i, m):
                if forced_rows >> avail[k] & 1:
                    return EXHAUSTED
            if leaf(ur, uc, us, csum):
                witness = sorted(chosen)
                return ACHIEVED
            return EXHAUSTED
        if i == m or m - i < ell - placed:
            return EXHAUSTED
        need = ell - placed
        if (forced_cols & ~uc).bit_count() > need:
            return EXHAUSTED
        if (required_syms & ~us).bit_count() > need:
            return EXHAUSTED
        r = avail[i]
        row = rows[r]
        cand = col_pool & ~uc & ~forb[r]
        while cand:
            c = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            s = row[c]
            if us >> s & 1 or not sym_pool >> s & 1:
                continue
            chosen.append((r, c, s))
            nsum = group[csum * n + s] if group is not None else 0
            st = rec(i + 1, placed + 1, skips, ur | 1 << r, uc | 1 << c, us | 1 << s, nsum)
            chosen.pop()
            if st != EXHAUSTED:
                return st
        if skips < max_skips and not forced_rows >> r & 1:
            st = rec(i + 1, placed, skips + 1, ur, uc, us, csum)
            if st != EXHAUSTED:
                return st
        return EXHAUSTED

    status = rec(0, len(chosen), 0, used_rows, used_cols, used_syms, csum)
    return status, witness, nodes


def species_min(n: int, flat: list[int]) -> bytes:
    """Least reduced form of one square over first-row choices x column orders.

    For a first row r0 and column order, symbols are renamed so the first
    row reads 0..n-1 and the remaining rows are sorted by first-column
    symbol; the minimum is taken cell-by-cell with early abandonment.
    """
    rows = [flat[r * n : (r + 1) * n] for r in range(n)]
    col_sym_row = [[0] * n for _ in range(n)]
    for r in range(n):
        row = rows[r]
        for c in range(n):
            col_sym_row[c][row[c]] = r
    best = bytearray(range(n)) + bytearray([255]) * (n * n - n)
    rename = [0] * n
    for r0 in range(n):
        base = rows[r0]
        for cols in itertools.permutations(range(n)):
            for j, c in enumerate(cols):
                rename[base[c]] = j
            csr = col_sym_row[cols[0]]
            pos = n
            better = False
            abandoned = False
            for i in range(1, n):
                ri = csr[base[cols[i]]]
                rrow = rows[ri]
                for c in cols:
                    v = rename[rrow[c]]
                    if better:
                        best[pos] = v
                    else:
                        b = best[pos]
                        if v > b:
                            abandoned = True
                            break
                        if v < b:
                            better = True
                            best[pos] = v
                    pos += 1
                if abandoned:
                    break
    return bytes(best)
