"""Explicit square families and the maximal partial transversals they carry.

Two families are built by turning one intercalate in a Cayley table:

* ``build_l_star(m, q)``: order 8m+4q over Z2 x Z2 x Z_{2m+q}.  Witnesses of
  every length in [4m+2q, 8m+4q] are assembled from explicit triple families,
  so the square is omniversal.
* ``build_m_star(m)``: order 4m+2 over Z_{4m+2} written in index-2 block
  form.  Witnesses exist for every length except 2m+1, so the square is
  near-omniversal.

Also here: the generic block recipes that transplant those ideas to other
squares (``every_second_witness``, ``three_fifths_witness``) and the two
literal order-8 squares with unusual spectra.  Every witness is re-verified
(partial transversal, maximality, length) before it is returned; a failure
raises WitnessVerificationError and means a bug, never bad luck.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .engine import (
    LengthOutOfRange,
    find_transversal,
    is_maximal,
    is_partial_transversal,
)
from .groups import Group, Subgroup
from .latin import LatinSquare, SubmatrixWindow, Triple, from_rows, turn_intercalate, window


class WitnessVerificationError(RuntimeError):
    """A constructed witness failed re-verification; signals an implementation bug."""


def _verified(square: LatinSquare, triples, length: int) -> tuple[Triple, ...]:
    out = tuple(sorted(triples))
    if len(out) != length:
        raise WitnessVerificationError(f"expected {length} triples, built {len(out)}")
    if not is_partial_transversal(square, out):
        raise WitnessVerificationError("not a partial transversal of the host square")
    if not is_maximal(square, out):
        raise WitnessVerificationError("partial transversal is extendable")
    return out


@dataclass(frozen=True)
class LStarParams:
    """Parameters of the turned-intercalate family over Z2 x Z2 x Z_{2m+q}."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 1 or self.q not in (0, 1):
            raise ValueError("need m >= 1 and q in {0, 1}")

    @property
    def n(self) -> int:
        return 8 * self.m + 4 * self.q


class _LStar:
    """Element arithmetic for G = <x> x <y, z> with the fixed coset order.

    Elements are indices u*h + i for the Klein part u in (1, y, z, yz) and
    the power i of x, where h = 2m+q is the order of x.  So the table lists
    the cosets H, yH, zH, yzH in that order, each coset by powers of x.
    """

    def __init__(self, m: int, q: int):
        self.m, self.q = m, q
        self.h = 2 * m + q
        self.n = 4 * self.h
        self.y = self.h
        self.z = 2 * self.h
        self.yz = 3 * self.h

    def mul(self, a: int, b: int) -> int:
        return ((a // self.h ^ b // self.h) * self.h) + (a + b) % self.h

    def x(self, i: int) -> int:
        return i % self.h

    def prod(self, *els: int) -> int:
        acc = 0
        for e in els:
            acc = self.mul(acc, e)
        return acc


def _checked(m: int, q: int) -> _LStar:
    LStarParams(m, q)
    return _LStar(m, q)


def build_l_star(m: int, q: int) -> LatinSquare:
    """Cayley table of Z2 x Z2 x Z_{2m+q} with the (1,1),(1,y),(y,1),(y,y) cells turned."""
    g = _checked(m, q)
    grid = [[g.mul(a, b) for b in range(g.n)] for a in range(g.n)]
    return turn_intercalate(LatinSquare(tuple(map(tuple, grid))), 0, g.y, 0, g.y)


def _l_plain(g: _LStar) -> LatinSquare:
    return LatinSquare(tuple(tuple(g.mul(a, b) for b in range(g.n)) for a in range(g.n)))


@dataclass(frozen=True)
class TkqParams:
    """Per-length parameters of the core witness family in build_l_star(m, q).

    For target length 4m+2q+k the family uses j swapped triples and the
    generator pair (w, v): w = y for even k, z for odd k, and v the other.
    """

    m: int
    q: int
    k: int

    def __post_init__(self):
        if not 1 - self.q <= self.k <= 4 * self.m + self.q - 2:
            raise ValueError("k outside the covered band")

    @property
    def j(self) -> int:
        return (self.k + self.q - 1) // 2

    @property
    def w_is_y(self) -> bool:
        return self.k % 2 == 0


def _u_family(g: _LStar, w: int) -> tuple[list[Triple], list[Triple]]:
    """The anchor partial transversal split as (symbol-in-H part, rest).

    The first two sub-families carry symbols in H: they form the pool the
    swappable j-subset is drawn from.  Sizes: (m-1+q) + m + m + m triples.
    """
    m, q = g.m, g.q
    pool = [(g.x(i), g.x(i), g.x(2 * i)) for i in range(1, m + q)]
    pool += [(g.mul(w, g.x(i + 1)), g.mul(w, g.x(i)), g.x(2 * i + 1)) for i in range(m)]
    rest = [
        (g.x(m + q + i), g.mul(w, g.x(m + q + i)), g.mul(w, g.x(2 * i + q)))
        for i in range(m)
    ]
    rest += [
        (g.mul(w, g.x(m + 1 + q + i)), g.x(m + q + i), g.mul(w, g.x(2 * i + q + 1)))
        for i in range(m)
    ]
    return pool, rest


def _t_kq(g: _LStar, p: TkqParams) -> list[Triple]:
    """Core witness of length 4m+2q+k: three translated copies of a j-subset.

    A j-subset K of the anchor family (symbols in H, excluding x^{2m}) is replaced
    by its images under a column translation into block B, a row translation
    into block C, and a two-sided x^m-shift into block D; case-specific
    closing triples make the result maximal.
    """
    m, q = g.m, g.q
    w = g.y if p.w_is_y else g.z
    v = g.z if p.w_is_y else g.y
    vw = g.mul(v, w)
    pool, rest = _u_family(g, w)
    banned = g.x(2 * m)
    eligible = [t for t in pool if t[2] < g.h and t[2] != banned]
    assert len(eligible) == 2 * m - 1 and p.j <= len(eligible)
    chosen = set(eligible[: p.j])

    def sigma(t: Triple) -> Triple:
        r, c, s = t
        if r < g.h:
            return (g.prod(g.x(-m), g.yz, r), g.prod(c, g.x(m), g.yz), s)
        return (g.prod(g.x(m), g.yz, r), g.prod(c, g.x(-m), g.yz), s)

    out = [t for t in pool + rest if t not in chosen]
    out += [(r, g.mul(c, v), g.mul(s, v)) for r, c, s in chosen]
    out += [(g.mul(vw, r), c, g.mul(vw, s)) for r, c, s in chosen]
    out += [sigma(t) for t in chosen]

    xm = g.x(m)
    if p.k % 2 and q == 0:
        out += [(0, 0, g.y), (g.prod(xm, g.yz), g.prod(xm, g.yz), 0)]
    elif p.k % 2 and q == 1:
        out += [(0, 0, g.y), (g.prod(g.x(m + 1), g.z), g.prod(xm, g.z), 0), (g.yz, g.y, g.z)]
    elif q == 0:
        out += [(0, g.z, g.z), (g.prod(xm, g.yz), g.prod(xm, g.yz), 0), (g.yz, 0, g.yz)]
    else:
        out += [(0, 0, g.y), (g.prod(g.x(m + 1), g.y), g.prod(xm, g.y), 0)]
    return out


def _l_star_block_transversal(g: _LStar, square: LatinSquare) -> list[Triple]:
    """Length-4m witness for q = 0: a transversal of the zH+yzH coset block.

    That block is a subsquare on the symbols H+yH, untouched by the turned
    cells, so its transversal extends to nothing outside the block.
    """
    lo = 2 * g.h
    flat = [square.grid[r][c] for r in range(lo, g.n) for c in range(lo, g.n)]
    size = 2 * g.h
    code, wit, _ = _kernels.search(size, flat, size)
    assert code == _kernels.ACHIEVED
    return [(r + lo, c + lo, flat[r * size + c]) for r, c, _s in wit]


def _l_star_packed_family(g: _LStar) -> list[Triple]:
    """Length-(n-2) witness for q = 1: four interleaved x-power progressions."""
    out = []
    for i in range(1, g.h):  # i runs over 1..2m with h = 2m+1
        out += [
            (g.x(i), g.x(i), g.x(2 * i)),
            (g.mul(g.x(i), g.z), g.mul(g.x(i), g.yz), g.mul(g.x(2 * i), g.y)),
            (g.mul(g.x(i), g.yz), g.mul(g.x(i), g.y), g.mul(g.x(2 * i), g.z)),
            (g.mul(g.x(i), g.y), g.mul(g.x(i + 1), g.z), g.mul(g.x(2 * i + 1), g.yz)),
        ]
    out += [(0, 0, g.y), (g.y, g.yz, g.z)]
    return out


def l_star_witness(m: int, q: int, length: int) -> tuple[Triple, ...]:
    """A verified maximal partial transversal of the given length in build_l_star(m, q).

    Lengths n and n-1 come from transversal searches of the unturned table
    (avoiding, resp. passing through, the turned cells); length 4m (q = 0)
    from a coset-block transversal; length n-2 (q = 1) from an explicit
    family; every other length from the translated j-subset family.
    """
    g = _checked(m, q)
    n = g.n
    lo = n // 2
    if not lo <= length <= n:
        raise LengthOutOfRange(f"length {length} outside [{lo}, {n}] for order {n}")
    square = build_l_star(m, q)
    corners = [(0, 0), (0, g.y), (g.y, 0), (g.y, g.y)]

    if length == n:
        st = find_transversal(_l_plain(g), forbidden_cells=corners)
        assert st.status == "achieved"
        triples = st.witness
    elif length == n - 1:
        st = find_transversal(_l_plain(g), preplaced=[(0, 0)], forbidden_cells=corners[1:])
        assert st.status == "achieved"
        triples = [t for t in st.witness if t != (0, 0, 0)]
    elif q == 0 and length == 4 * m:
        triples = _l_star_block_transversal(g, square)
    elif q == 1 and length == n - 2:
        triples = _l_star_packed_family(g)
    else:
        triples = _t_kq(g, TkqParams(m, q, length - lo))
    return _verified(square, triples, length)


def build_m_star(m: int) -> LatinSquare:
    """Order-(4m+2) square: Z_{4m+2} in index-2 block form with one intercalate turned.

    Blocks of order 2m+1 hold entries 2(i+j), 2(i+j)+1, 2(i+j)+1, 2(i+j)+2
    (top-left, top-right, bottom-left, bottom-right, all mod 4m+2); the turn
    sets the two block-diagonal cells to 2m+1 and the two others to 0.
    """
    if m < 0:
        raise ValueError("need m >= 0")
    n, b = 4 * m + 2, 2 * m + 1
    grid = [[0] * n for _ in range(n)]
    for i in range(b):
        for j in range(b):
            grid[i][j] = 2 * (i + j) % n
            grid[i][b + j] = (2 * (i + j) + 1) % n
            grid[b + i][j] = (2 * (i + j) + 1) % n
            grid[b + i][b + j] = (2 * (i + j) + 2) % n
    grid[0][0] = grid[b + m][b + m] = b
    grid[0][b + m] = grid[b + m][0] = 0
    return from_rows(grid)


def congruence_solution(a: int, m: int) -> int | None:
    """The unique i in 1..m with 4i+a = 0 mod 4m+2, present iff a = 2 mod 4."""
    if not 0 <= a <= 4 * m + 1:
        raise ValueError("residue out of range")
    if a % 4 != 2:
        return None
    i = m - (a - 2) // 4
    assert 1 <= i <= m and (4 * i + a) % (4 * m + 2) == 0
    return i


def _m_star_odd_length(m: int, k: int) -> list[tuple[str, int, int]]:
    """Block cells of the length-(2m+2k+3) family: one diagonal run per block."""
    cells = [("A", i, i + k + 1) for i in range(k + 1)]
    cells += [("D", j + k + 1, j) for j in range(k + 1)]
    cells += [("C", i, i) for i in range(k + 1)]
    cells += [("B", j, j) for j in range(k + 1, 2 * m + 1)]
    return cells


def _m_star_even_length(m: int, k: int) -> list[tuple[str, int, int]]:
    """Block cells of the length-(2m+2k+2) family; the off-block runs split by parity of m."""
    cells = [("C", i, i) for i in range(1, k + 1)] + [("C", m, 0)]
    cells += [("B", j, j) for j in range(k + 1, 2 * m + 1)] + [("B", 0, 0)]
    if m % 2 == 0:
        cells += [("A", i, i + m) for i in range(1, k + 1)]
        cells += [("D", j + m, j) for j in range(1, min(k, m // 2 - 1) + 1)]
        cells += [("D", j + m + 2, j) for j in range(m // 2, k + 1)]
    else:
        half = (m - 1) // 2
        cells += [("A", i, i + m) for i in range(1, min(k, half) + 1)]
        cells += [("A", j, j + m + 1) for j in range(half + 1, k + 1)]
        cells += [("D", j + m, j) for j in range(1, min(k, half) + 1)]
        cells += [("D", i + m + 1, i) for i in range(half + 1, k + 1)]
    return cells


def m_star_witness(m: int, length: int) -> tuple[Triple, ...]:
    """A verified maximal partial transversal of the given length in build_m_star(m).

    Valid lengths are 2m+2 .. 4m+2; length 2m+1 is rejected because the
    square has a transversal and no order-(4m+2) square carries both.
    Lengths below 4m+2 use the explicit block families (block-local rows
    reduce mod 2m+1 when a run overflows); the transversal is searched.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    n, b = 4 * m + 2, 2 * m + 1
    if not 2 * m + 2 <= length <= n:
        raise LengthOutOfRange(
            f"length {length} outside [{2 * m + 2}, {n}] for order {n}"
            + (" (no maximal partial transversal of half order exists)" if length == 2 * m + 1 else "")
        )
    square = build_m_star(m)
    if length == n:
        st = find_transversal(square)
        assert st.status == "achieved"
        return _verified(square, st.witness, length)
    k, odd = divmod(length - (2 * m + 2), 2)
    cells = _m_star_odd_length(m, k) if odd else _m_star_even_length(m, k)
    off = {"A": (0, 0), "B": (0, b), "C": (b, 0), "D": (b, b)}
    triples = []
    for block, i, j in cells:
        r = off[block][0] + i % b
        c = off[block][1] + j % b
        triples.append((r, c, square.grid[r][c]))
    return _verified(square, triples, length)


def every_second_witness(
    square: LatinSquare, win: SubmatrixWindow, near_t, x: int
) -> tuple[Triple, ...]:
    """Maximal partial transversal of length n/2 + 2x from an order-n/2 subsquare.

    ``win`` must be an order-n/2 subsquare A of the square; ``near_t`` a
    near-transversal of A given as global triples.  The recipe: take a
    length-x partial transversal of the complementary block D that includes
    the symbol missing from near_t, merge it with the non-colliding part of
    near_t, then top up greedily from the off-diagonal blocks.  Works for
    1 <= x <= n/8.
    """
    n = square.n
    half = n // 2
    if n % 2 or len(win.rows) != half or len(win.cols) != half:
        raise ValueError("window is not an order-n/2 block")
    if not 1 <= x <= n // 8:
        raise ValueError("need 1 <= x <= n/8")
    rows_a, cols_a = sorted(win.rows), sorted(win.cols)
    syms_a = {square.grid[r][c] for r in rows_a for c in cols_a}
    if len(syms_a) != half:
        raise ValueError("window is not a subsquare on n/2 symbols")
    near_t = tuple(sorted(near_t))
    if len(near_t) != half - 1 or not is_partial_transversal(square, near_t):
        raise ValueError("not a near-transversal")
    if any(r not in win.rows or c not in win.cols for r, c, _ in near_t):
        raise ValueError("near-transversal leaves the window")
    missing = (syms_a - {s for _, _, s in near_t}).pop()

    rows_d = [r for r in range(n) if r not in win.rows]
    cols_d = [c for c in range(n) if c not in win.cols]
    first = next(
        (r, c, square.grid[r][c])
        for r in rows_d
        for c in cols_d
        if square.grid[r][c] == missing
    )
    part = [first]
    ur, uc, us = {first[0]}, {first[1]}, {first[2]}
    for r in rows_d:
        if len(part) == x:
            break
        if r in ur:
            continue
        for c in cols_d:
            s = square.grid[r][c]
            if c not in uc and s not in us:
                part.append((r, c, s))
                ur.add(r), uc.add(c), us.add(s)
                break
    assert len(part) == x
    merged = part + [t for t in near_t if t[2] not in us]
    assert len(merged) == half

    ur = {t[0] for t in merged}
    uc = {t[1] for t in merged}
    us = {t[2] for t in merged}
    side = [(r, c) for r in rows_a for c in cols_d] + [(r, c) for r in rows_d for c in cols_a]
    for r, c in side:
        if len(merged) == half + 2 * x:
            break
        s = square.grid[r][c]
        if r not in ur and c not in uc and s not in us:
            merged.append((r, c, s))
            ur.add(r), uc.add(c), us.add(s)
    return _verified(square, merged, half + 2 * x)


def three_fifths_witness(group: Group, nrm: Subgroup) -> tuple[Triple, ...]:
    """Maximal partial transversal of length 3n/5 over a Z5 quotient.

    Needs a normal subgroup with quotient of order 5 whose own table has a
    transversal.  Three quotient cells in the pattern (2,3),(3,4),(4,2)
    receive block transversals; the result cannot grow because every free
    row meets every free column inside already-used symbol cosets.
    """
    if nrm.parent.table != group.table:
        raise ValueError("subgroup belongs to another group")
    els = sorted(nrm.elements)
    if group.order != 5 * len(els):
        raise ValueError("quotient must have order 5")
    sub = set(els)
    for g in range(group.order):
        for h in els:
            if group.mul(group.mul(g, h), group.inv(g)) not in sub:
                raise ValueError("subgroup is not normal")

    rep = next(g for g in range(group.order) if g not in sub)
    label = {}
    cur, members = 0, list(sub)
    for i in range(5):
        for e in members:
            label[e] = i
        cur = group.mul(cur, rep)
        members = [group.mul(cur, h) for h in els]
    assert len(label) == group.order

    ntab = nrm.as_group()
    flat = [s for row in ntab.table for s in row]
    code, _, _ = _kernels.search(ntab.order, flat, ntab.order)
    if code != _kernels.ACHIEVED:
        raise ValueError("subgroup table has no transversal")

    square = LatinSquare(tuple(tuple(r) for r in group.table))
    out: list[Triple] = []
    for qr, qc in ((2, 3), (3, 4), (4, 2)):
        rows = sorted(g for g in range(group.order) if label[g] == qr)
        cols = sorted(g for g in range(group.order) if label[g] == qc)
        syms = sorted({group.mul(r, c) for r in rows for c in cols})
        local = {s: i for i, s in enumerate(syms)}
        k = len(rows)
        blk = [local[group.mul(r, c)] for r in rows for c in cols]
        code, wit, _ = _kernels.search(k, blk, k)
        assert code == _kernels.ACHIEVED
        out += [(rows[r], cols[c], syms[s]) for r, c, s in wit]
    return _verified(square, out, 3 * group.order // 5)


_MU8_ROWS = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (1, 0, 3, 2, 5, 4, 7, 6),
    (2, 3, 0, 1, 6, 7, 4, 5),
    (3, 2, 1, 0, 7, 6, 5, 4),
    (4, 5, 6, 7, 3, 2, 1, 0),
    (5, 4, 7, 6, 0, 1, 2, 3),
    (6, 7, 4, 5, 2, 3, 0, 1),
    (7, 6, 5, 4, 1, 0, 3, 2),
)

_TWO_LENGTHS_ROWS = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (1, 2, 3, 0, 5, 6, 7, 4),
    (2, 3, 0, 1, 6, 7, 4, 5),
    (3, 0, 1, 2, 7, 4, 5, 6),
    (7, 6, 5, 4, 0, 3, 2, 1),
    (6, 5, 4, 7, 3, 2, 1, 0),
    (5, 4, 7, 6, 2, 1, 0, 3),
    (4, 7, 6, 5, 1, 0, 3, 2),
)

EXCEPTIONAL_NAMES = ("mu8_example", "two_lengths_example")


def exceptional_order8(which: str) -> LatinSquare:
    """Order-8 squares with unusual spectra.

    ``mu8_example`` misses only the full length 8 (its spectrum is 4..7);
    ``two_lengths_example`` achieves only lengths 6 and 7.
    """
    if which == "mu8_example":
        return from_rows([list(r) for r in _MU8_ROWS])
    if which == "two_lengths_example":
        return from_rows([list(r) for r in _TWO_LENGTHS_ROWS])
    raise ValueError(f"unknown square name: {which!r}")
