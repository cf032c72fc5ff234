"""Latin squares as triple systems: validation, surgery, windows, species.

A square of order n is stored as a dense grid over symbols 0..n-1; a cell
(r, c) holding s is the triple (r, c, s).  Submatrix windows collect the
symbols of a set of rows crossed with a set of columns, and a window whose
row, column and symbol counts agree is a subsquare.  The species key is a
complete invariant under the six conjugate (row/column/symbol role) maps
plus isotopy, computed as the lexicographically least reduced form.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

Triple = tuple[int, int, int]


class LatinError(ValueError):
    """Grid validation failure with a machine-checkable kind and index."""

    def __init__(self, kind: str, index: int | None = None, detail: str = ""):
        self.kind = kind
        self.index = index
        msg = kind if index is None else f"{kind}({index})"
        super().__init__(msg + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.grid)

    def symbol(self, r: int, c: int) -> int:
        return self.grid[r][c]

    def triples(self) -> Iterator[Triple]:
        for r, row in enumerate(self.grid):
            for c, s in enumerate(row):
                yield (r, c, s)

    def flat(self) -> list[int]:
        return [s for row in self.grid for s in row]


@dataclass(frozen=True)
class SubmatrixWindow:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    symbols: frozenset[int]


def validate(grid: Sequence[Sequence[int]]) -> LatinSquare:
    """Check shape, symbol range and the Latin property; return the square."""
    n = len(grid)
    if n == 0:
        raise LatinError("empty-grid")
    rows = tuple(tuple(row) for row in grid)
    for r, row in enumerate(rows):
        if len(row) != n:
            raise LatinError("ragged-row", r)
        for s in row:
            if not isinstance(s, int) or not 0 <= s < n:
                raise LatinError("symbol-out-of-range", r, f"row {r} holds {s!r}")
        if len(set(row)) != n:
            raise LatinError("duplicate-in-row", r)
    for c in range(n):
        if len({row[c] for row in rows}) != n:
            raise LatinError("duplicate-in-column", c)
    return LatinSquare(rows)


def from_rows(rows: Sequence[Sequence[int]]) -> LatinSquare:
    return validate(rows)


# ---------------------------------------------------------------------------
# surgery


def turn_intercalate(sq: LatinSquare, r1: int, r2: int, c1: int, c2: int) -> LatinSquare:
    """Swap the two symbols of the 2x2 subsquare on rows r1,r2 and cols c1,c2."""
    if r1 == r2 or c1 == c2:
        raise LatinError("not-an-intercalate", None, "rows and columns must differ")
    a = sq.grid[r1][c1]
    b = sq.grid[r1][c2]
    if a == b or sq.grid[r2][c2] != a or sq.grid[r2][c1] != b:
        raise LatinError("not-an-intercalate", None, f"cells ({r1},{r2})x({c1},{c2})")
    g = [list(row) for row in sq.grid]
    g[r1][c1], g[r1][c2] = b, a
    g[r2][c1], g[r2][c2] = a, b
    return LatinSquare(tuple(tuple(row) for row in g))


def _check_perm(p: Sequence[int], n: int, what: str) -> tuple[int, ...]:
    q = tuple(p)
    if sorted(q) != list(range(n)):
        raise LatinError("not-a-permutation", None, what)
    return q


def apply_isotopy(
    sq: LatinSquare,
    row_perm: Sequence[int],
    col_perm: Sequence[int],
    sym_perm: Sequence[int],
) -> LatinSquare:
    """Relabel rows, columns and symbols; (r,c,s) maps to (pr[r], pc[c], ps[s])."""
    n = sq.n
    pr = _check_perm(row_perm, n, "row permutation")
    pc = _check_perm(col_perm, n, "column permutation")
    ps = _check_perm(sym_perm, n, "symbol permutation")
    g = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            g[pr[r]][pc[c]] = ps[sq.grid[r][c]]
    return LatinSquare(tuple(tuple(row) for row in g))


CONJUGATE_NAMES = ("rcs", "crs", "rsc", "src", "csr", "scr")


def conjugate(sq: LatinSquare, which: str) -> LatinSquare:
    """Permute the three triple roles; ``which`` names the new (row, col, sym) order."""
    if which not in CONJUGATE_NAMES:
        raise LatinError("unknown-conjugate", None, which)
    n = sq.n
    g = [[-1] * n for _ in range(n)]
    pos = {"r": 0, "c": 1, "s": 2}
    sel = tuple(pos[ch] for ch in which)
    for t in sq.triples():
        g[t[sel[0]]][t[sel[1]]] = t[sel[2]]
    return LatinSquare(tuple(tuple(row) for row in g))


# ---------------------------------------------------------------------------
# windows


def window(sq: LatinSquare, rows: Iterable[int], cols: Iterable[int]) -> SubmatrixWindow:
    rt = tuple(sorted(set(rows)))
    ct = tuple(sorted(set(cols)))
    n = sq.n
    if not rt or not ct:
        raise LatinError("empty-window")
    if rt[0] < 0 or rt[-1] >= n or ct[0] < 0 or ct[-1] >= n:
        raise LatinError("window-out-of-range")
    syms = frozenset(sq.grid[r][c] for r in rt for c in ct)
    return SubmatrixWindow(rt, ct, syms)


def is_subsquare(sq: LatinSquare, win: SubmatrixWindow) -> bool:
    """True iff the window's rows x cols form a Latin subsquare on its symbols."""
    k = len(win.rows)
    if len(win.cols) != k or len(win.symbols) != k:
        return False
    for r in win.rows:
        if {sq.grid[r][c] for c in win.cols} != win.symbols:
            return False
    return True


def subgrid(sq: LatinSquare, rows: Sequence[int], cols: Sequence[int]) -> list[list[int]]:
    return [[sq.grid[r][c] for c in cols] for r in rows]


# ---------------------------------------------------------------------------
# species


SPECIES_MAX_ORDER = 7


def species_key(sq: LatinSquare) -> bytes:
    """Canonical species form: least reduced grid over all conjugates and isotopies.

    For each of the six conjugates, every choice of first row and column
    order yields one reduced square (symbols renamed so the first row reads
    0..n-1, remaining rows sorted by first-column symbol); the key is the
    lexicographic minimum of all of them, serialised row-major.
    """
    n = sq.n
    if n > SPECIES_MAX_ORDER:
        raise LatinError("species-order-too-large", n)
    from . import _kernels

    best = None
    for name in CONJUGATE_NAMES:
        flat = conjugate(sq, name).flat()
        cand = _kernels.species_min(n, flat)
        if best is None or cand < best:
            best = cand
    return best


def key_to_square(key: bytes, n: int) -> LatinSquare:
    if len(key) != n * n:
        raise LatinError("bad-species-key")
    return validate([[key[r * n + c] for c in range(n)] for r in range(n)])


def reduced_squares(n: int) -> Iterator[LatinSquare]:
    """All reduced squares of order n (first row and first column in order)."""
    if n == 1:
        yield LatinSquare(((0,),))
        return
    rows: list[tuple[int, ...]] = [tuple(range(n))]
    masks = [1 << c for c in range(n)]  # per-column symbol masks, row 0 placed

    def fill(r: int, c: int, row: list[int], row_mask: int) -> Iterator[LatinSquare]:
        if c == n:
            rows.append(tuple(row))
            yield from place_row(r + 1)
            rows.pop()
            return
        for s in range(n):
            bit = 1 << s
            if row_mask & bit or masks[c] & bit:
                continue
            row[c] = s
            masks[c] |= bit
            yield from fill(r, c + 1, row, row_mask | bit)
            masks[c] ^= bit

    def place_row(r: int) -> Iterator[LatinSquare]:
        if r == n:
            yield LatinSquare(tuple(rows))
            return
        row = [r] + [-1] * (n - 1)  # reduced: column 0 reads 0..n-1
        masks[0] |= 1 << r
        yield from fill(r, 1, row, 1 << r)
        masks[0] ^= 1 << r

    yield from place_row(1)


def species_census(n: int) -> dict[bytes, int]:
    """Map species key -> number of reduced squares of that species."""
    counts: dict[bytes, int] = {}
    for sq in reduced_squares(n):
        key = species_key(sq)
        counts[key] = counts.get(key, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# file format and hashing: first line the order, then n rows of symbols


def canonical_bytes(sq: LatinSquare) -> bytes:
    lines = [str(sq.n)]
    lines += [" ".join(map(str, row)) for row in sq.grid]
    return ("\n".join(lines) + "\n").encode()


def square_hash(sq: LatinSquare) -> str:
    return hashlib.sha256(canonical_bytes(sq)).hexdigest()


def write_square_file(sq: LatinSquare, path: str | Path) -> None:
    Path(path).write_bytes(canonical_bytes(sq))


def parse_square_text(text: str) -> LatinSquare:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 1:
        raise LatinError("bad-header", None, "first line must hold the order alone")
    try:
        n = int(rows[0][0])
        grid = [[int(v) for v in row] for row in rows[1:]]
    except ValueError:
        raise LatinError("non-integer-entry") from None
    if len(grid) != n:
        raise LatinError("bad-row-count", len(grid))
    return validate(grid)


def read_square_file(path: str | Path) -> LatinSquare:
    return parse_square_text(Path(path).read_text())
