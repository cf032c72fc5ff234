"""Independent reference implementations used to cross-check the package.

Everything here is deliberately unpruned and engine-free: partial
transversals are enumerated as lexicographically increasing cell sequences
with a global free-cell scan for maximality, so agreement with the pruned
search is meaningful evidence rather than a shared-bug tautology.
"""

from __future__ import annotations

from itertools import combinations, permutations


def maximal_pt_lengths(grid) -> list[int]:
    """Sorted set of lengths of all maximal partial transversals of a grid.

    Each partial transversal is visited exactly once, as its sorted
    cell-index sequence; maximality is checked by scanning every free cell.
    """
    n = len(grid)
    lengths: set[int] = set()

    def is_maximal(rm: int, cm: int, sm: int) -> bool:
        for r in range(n):
            if rm >> r & 1:
                continue
            row = grid[r]
            for c in range(n):
                if not (cm >> c & 1) and not (sm >> row[c] & 1):
                    return False
        return True

    def dfs(start: int, rm: int, cm: int, sm: int, k: int) -> None:
        if is_maximal(rm, cm, sm):
            lengths.add(k)
        for i in range(start, n * n):
            r, c = divmod(i, n)
            s = grid[r][c]
            if rm >> r & 1 or cm >> c & 1 or sm >> s & 1:
                continue
            dfs(i + 1, rm | 1 << r, cm | 1 << c, sm | 1 << s, k + 1)

    dfs(0, 0, 0, 0, 0)
    return sorted(lengths)


def maximal_pts_of_length(grid, length: int) -> list[tuple[tuple[int, int, int], ...]]:
    """All maximal partial transversals of one length, as sorted triple tuples."""
    n = len(grid)
    out: list[tuple[tuple[int, int, int], ...]] = []

    def is_maximal(rm: int, cm: int, sm: int) -> bool:
        for r in range(n):
            if rm >> r & 1:
                continue
            row = grid[r]
            for c in range(n):
                if not (cm >> c & 1) and not (sm >> row[c] & 1):
                    return False
        return True

    def dfs(start, rm, cm, sm, picked):
        if len(picked) == length:
            if is_maximal(rm, cm, sm):
                out.append(tuple(picked))
            return
        for i in range(start, n * n):
            r, c = divmod(i, n)
            s = grid[r][c]
            if rm >> r & 1 or cm >> c & 1 or sm >> s & 1:
                continue
            picked.append((r, c, s))
            dfs(i + 1, rm | 1 << r, cm | 1 << c, sm | 1 << s, picked)
            picked.pop()

    dfs(0, 0, 0, 0, [])
    return out


def is_partial_transversal_ref(grid, triples) -> bool:
    rows = [t[0] for t in triples]
    cols = [t[1] for t in triples]
    syms = [t[2] for t in triples]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        return False
    if len(set(syms)) != len(syms):
        return False
    return all(grid[r][c] == s for r, c, s in triples)


def is_maximal_ref(grid, triples) -> bool:
    if not is_partial_transversal_ref(grid, triples):
        return False
    n = len(grid)
    rows = {t[0] for t in triples}
    cols = {t[1] for t in triples}
    syms = {t[2] for t in triples}
    return all(
        r in rows or c in cols or grid[r][c] in syms
        for r in range(n)
        for c in range(n)
    )


def has_transversal_ref(grid) -> bool:
    """Transversal existence by brute force over column permutations."""
    n = len(grid)
    return any(
        len({grid[r][p[r]] for r in range(n)}) == n for p in permutations(range(n))
    )


def subsquare_windows_ref(grid, m: int):
    """All m x m subsquares of a grid, by scanning row and column subsets."""
    n = len(grid)
    found = []
    for rows in combinations(range(n), m):
        for cols in combinations(range(n), m):
            syms = {grid[r][c] for r in rows for c in cols}
            if len(syms) == m:
                found.append((rows, cols, frozenset(syms)))
    return found


def sumset_ref(add, xs, ys) -> frozenset:
    return frozenset(add(a, b) for a in xs for b in ys)


def stabilizer_ref(group, zs) -> frozenset:
    z = frozenset(zs)
    return frozenset(
        h for h in range(group.order) if frozenset(group.mul(h, a) for a in z) == z
    )
