"""Small finite groups as dense multiplication tables.

Every group is an n x n table over element indices 0..n-1 with 0 as the
identity.  The catalog covers one representative per isomorphism class for
each order up to 24, assembled from cyclic, dihedral and dicyclic families,
direct and semidirect products, and three generated models (alternating and
symmetric permutation groups, 2x2 special linear matrices over GF(3)).
Distinctness of the representatives within an order is certified at build
time by an invariant vector; completeness follows from the known class
counts, which are asserted too.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class GroupError(ValueError):
    """A table or constructor input violates the group laws."""


# Number of isomorphism classes for each order 1..24.
CLASS_COUNTS = (1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15)

MAX_CATALOG_ORDER = 24


@dataclass(frozen=True)
class Group:
    """Immutable multiplication table with precomputed inverses."""

    name: str
    table: tuple[tuple[int, ...], ...]
    inverses: tuple[int, ...]
    is_abelian: bool
    generators: tuple[tuple[str, int], ...] = ()

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"Group({self.name!r}, order={self.order})"


@dataclass(frozen=True)
class Subgroup:
    """A subset of a parent group's indices, closed under the table."""

    parent: Group
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def as_group(self, name: str | None = None) -> Group:
        """Relabel the subgroup as a standalone group with identity 0."""
        elems = sorted(self.elements)
        if elems[0] != 0:
            raise GroupError("subgroup must contain the identity")
        pos = {e: i for i, e in enumerate(elems)}
        table = tuple(
            tuple(pos[self.parent.mul(a, b)] for b in elems) for a in elems
        )
        return make_group(table, name or f"{self.parent.name}<{len(elems)}>")


def make_group(
    table: Sequence[Sequence[int]],
    name: str,
    generators: tuple[tuple[str, int], ...] = (),
) -> Group:
    """Validate a candidate table (identity, Latin property, associativity)."""
    n = len(table)
    if n == 0:
        raise GroupError("empty table")
    rows = tuple(tuple(row) for row in table)
    full = set(range(n))
    for r, row in enumerate(rows):
        if len(row) != n or set(row) != full:
            raise GroupError(f"row {r} is not a permutation of 0..{n - 1}")
    for c in range(n):
        if {row[c] for row in rows} != full:
            raise GroupError(f"column {c} is not a permutation of 0..{n - 1}")
    if any(rows[0][b] != b for b in range(n)) or any(rows[a][0] != a for a in range(n)):
        raise GroupError("element 0 is not a two-sided identity")
    # Orders in the catalog are small enough to check associativity in full.
    if n <= 64:
        triples = itertools.product(range(n), repeat=3)
    else:  # pragma: no cover - catalog never exceeds 24
        import random

        rng = random.Random(0)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000))
    for a, b, c in triples:
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise GroupError(f"associativity fails at ({a},{b},{c})")
    inverses = [0] * n
    for a in range(n):
        inverses[a] = rows[a].index(0)
    abelian = all(rows[a][b] == rows[b][a] for a in range(n) for b in range(a))
    return Group(name, rows, tuple(inverses), abelian, generators)


# ---------------------------------------------------------------------------
# constructors


def cyclic(n: int) -> Group:
    if n < 1:
        raise GroupError("cyclic order must be >= 1")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return make_group(table, f"Z{n}", (("x", 1 % n),))


def dihedral(order: int) -> Group:
    """Dihedral group of the given order (so dihedral(8) has 8 elements)."""
    if order < 2 or order % 2:
        raise GroupError("dihedral order must be an even integer >= 2")
    k = order // 2
    # indices: i < k is r^i, k + i is s r^i
    def mul(a: int, b: int) -> int:
        ra, sa = a % k, a >= k
        rb, sb = b % k, b >= k
        if not sa and not sb:
            return (ra + rb) % k
        if not sa and sb:
            return k + (rb - ra) % k
        if sa and not sb:
            return k + (ra + rb) % k
        return (rb - ra) % k

    table = tuple(tuple(mul(a, b) for b in range(order)) for a in range(order))
    return make_group(table, f"D{order}", (("r", 1 % k), ("s", k)))


def dicyclic(order: int) -> Group:
    """Dicyclic group of the given order (a multiple of 4; order 8 is Q8)."""
    if order < 8 or order % 4:
        raise GroupError("dicyclic order must be a multiple of 4, at least 8")
    k = order // 4
    m = 2 * k
    # indices: i < 2k is a^i, 2k + i is a^i b, with b^2 = a^k, b a b^-1 = a^-1
    def mul(x: int, y: int) -> int:
        ax, bx = x % m, x >= m
        ay, by = y % m, y >= m
        if not bx and not by:
            return (ax + ay) % m
        if not bx and by:
            return m + (ax + ay) % m
        if bx and not by:
            return m + (ax - ay) % m
        return (ax - ay + k) % m

    table = tuple(tuple(mul(a, b) for b in range(order)) for a in range(order))
    name = f"Q{order}" if order in (8, 16) else f"Dic{k}"
    return make_group(table, name, (("a", 1), ("b", m)))


def direct_product(g: Group, h: Group) -> Group:
    """Componentwise product on pairs, flattened as (a, b) -> a*|h| + b."""
    nh = h.order
    size = g.order * nh
    table = [[0] * size for _ in range(size)]
    for a in range(g.order):
        for b in range(nh):
            for c in range(g.order):
                for d in range(nh):
                    table[a * nh + b][c * nh + d] = g.mul(a, c) * nh + h.mul(b, d)
    return make_group(table, f"{g.name}x{h.name}")


def semidirect_product(
    g: Group, h: Group, action: Mapping[int, Sequence[int]] | Sequence[Sequence[int]]
) -> Group:
    """Split extension of g by h: (a,b)(c,d) = (a * action[b](c), b*d).

    ``action`` maps every h-element to an automorphism of g, given as a
    permutation of g's indices; it must itself be a homomorphism from h
    into Aut(g).  Pairs flatten as (a, b) -> a*|h| + b.
    """
    acts = [tuple(action[b]) for b in range(h.order)]
    ng, nh = g.order, h.order
    for b, p in enumerate(acts):
        if sorted(p) != list(range(ng)):
            raise GroupError(f"action of {b} is not a permutation")
        for x in range(ng):
            for y in range(ng):
                if p[g.mul(x, y)] != g.mul(p[x], p[y]):
                    raise GroupError(f"action of {b} is not an automorphism")
    if acts[0] != tuple(range(ng)):
        raise GroupError("identity of h must act trivially")
    for b in range(nh):
        for d in range(nh):
            combined = acts[h.mul(b, d)]
            for x in range(ng):
                if combined[x] != acts[b][acts[d][x]]:
                    raise GroupError("action is not a homomorphism into Aut(g)")
    size = ng * nh
    table = [[0] * size for _ in range(size)]
    for a in range(ng):
        for b in range(nh):
            for c in range(ng):
                for d in range(nh):
                    table[a * nh + b][c * nh + d] = g.mul(a, acts[b][c]) * nh + h.mul(b, d)
    return make_group(table, f"{g.name}:{h.name}")


def _perm_group(perms: list[tuple[int, ...]], name: str) -> Group:
    """Group of permutations under composition, identity relabelled to 0."""
    ident = tuple(range(len(perms[0])))
    perms = sorted(perms, key=lambda p: (p != ident, p))
    pos = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(pos[tuple(p[q[i]] for i in range(len(p)))] for q in perms) for p in perms
    )
    return make_group(table, name)


def symmetric(k: int) -> Group:
    return _perm_group([tuple(p) for p in itertools.permutations(range(k))], f"S{k}")


def alternating(k: int) -> Group:
    def parity(p: tuple[int, ...]) -> int:
        flips = sum(1 for i in range(len(p)) for j in range(i) if p[j] > p[i])
        return flips % 2

    evens = [tuple(p) for p in itertools.permutations(range(k)) if parity(tuple(p)) == 0]
    return _perm_group(evens, f"A{k}")


def special_linear_2_3() -> Group:
    """SL(2,3): 2x2 matrices over GF(3) with determinant 1."""
    mats = [
        (a, b, c, d)
        for a in range(3)
        for b in range(3)
        for c in range(3)
        for d in range(3)
        if (a * d - b * c) % 3 == 1
    ]
    ident = (1, 0, 0, 1)
    mats = sorted(mats, key=lambda mm: (mm != ident, mm))
    pos = {mm: i for i, mm in enumerate(mats)}
    table = []
    for a, b, c, d in mats:
        row = []
        for e, f, g2, h2 in mats:
            row.append(
                pos[
                    (
                        (a * e + b * g2) % 3,
                        (a * f + b * h2) % 3,
                        (c * e + d * g2) % 3,
                        (c * f + d * h2) % 3,
                    )
                ]
            )
        table.append(tuple(row))
    return make_group(tuple(table), "SL(2,3)")


# ---------------------------------------------------------------------------
# catalog


def _cyclic_power_aut(n: int, k: int) -> tuple[int, ...]:
    if gcd(k, n) != 1:
        raise GroupError("not an automorphism of the cyclic group")
    return tuple((k * x) % n for x in range(n))


def _inversion_aut(g: Group) -> tuple[int, ...]:
    if not g.is_abelian:
        raise GroupError("inversion is only an automorphism of abelian groups")
    return g.inverses


def _cyclic_action(h_order: int, aut: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Action of Z_{h_order} generated by one automorphism."""
    ident = tuple(range(len(aut)))
    acts = [ident]
    for _ in range(h_order - 1):
        prev = acts[-1]
        acts.append(tuple(aut[prev[x]] for x in range(len(aut))))
    if tuple(aut[acts[-1][x]] for x in range(len(aut))) != ident:
        raise GroupError("automorphism order does not divide the acting order")
    return acts


def _pauli_16() -> Group:
    """Central product of Z4 and D8, realised as (Z4xZ2):Z2."""
    base = direct_product(cyclic(4), cyclic(2))
    # conjugation sends (a, b) to (a + 2b, b)
    aut = tuple((((a + 2 * b) % 4) * 2 + b) for a in range(4) for b in range(2))
    grp = semidirect_product(base, cyclic(2), _cyclic_action(2, aut))
    return Group(
        "Z4oD8", grp.table, grp.inverses, grp.is_abelian, grp.generators
    )


def _dihedral_parity_action(g: Group, d8: Group) -> list[tuple[int, ...]]:
    """D8 acting on an abelian g through the exponent-parity map r^i s^j -> i mod 2."""
    inv = _inversion_aut(g)
    ident = tuple(range(g.order))
    k = d8.order // 2
    return [inv if (e % k) % 2 else ident for e in range(d8.order)]


def _named(name: str, builder):
    def build() -> Group:
        g = builder()
        return Group(name, g.table, g.inverses, g.is_abelian, g.generators)

    return build


def _catalog_builders() -> dict[int, list]:
    z = cyclic
    d = dihedral
    return {
        1: [lambda: z(1)],
        2: [lambda: z(2)],
        3: [lambda: z(3)],
        4: [lambda: z(4), lambda: direct_product(z(2), z(2))],
        5: [lambda: z(5)],
        6: [lambda: z(6), lambda: d(6)],
        7: [lambda: z(7)],
        8: [
            lambda: z(8),
            lambda: direct_product(z(4), z(2)),
            lambda: direct_product(direct_product(z(2), z(2)), z(2)),
            lambda: d(8),
            lambda: dicyclic(8),
        ],
        9: [lambda: z(9), lambda: direct_product(z(3), z(3))],
        10: [lambda: z(10), lambda: d(10)],
        11: [lambda: z(11)],
        12: [
            lambda: z(12),
            lambda: direct_product(z(2), z(6)),
            lambda: d(12),
            lambda: alternating(4),
            lambda: dicyclic(12),
        ],
        13: [lambda: z(13)],
        14: [lambda: z(14), lambda: d(14)],
        15: [lambda: z(15)],
        16: [
            lambda: z(16),
            lambda: direct_product(z(4), z(4)),
            lambda: direct_product(z(8), z(2)),
            lambda: direct_product(direct_product(z(4), z(2)), z(2)),
            lambda: direct_product(
                direct_product(direct_product(z(2), z(2)), z(2)), z(2)
            ),
            lambda: d(16),
            _named(
                "SD16",
                lambda: semidirect_product(z(8), z(2), _cyclic_action(2, _cyclic_power_aut(8, 3))),
            ),
            _named(
                "M16",
                lambda: semidirect_product(z(8), z(2), _cyclic_action(2, _cyclic_power_aut(8, 5))),
            ),
            lambda: dicyclic(16),
            lambda: direct_product(d(8), z(2)),
            lambda: direct_product(dicyclic(8), z(2)),
            lambda: semidirect_product(z(4), z(4), _cyclic_action(4, _cyclic_power_aut(4, 3))),
            _named(
                "(Z2xZ2):Z4",
                lambda: semidirect_product(
                    direct_product(z(2), z(2)), z(4), _cyclic_action(4, (0, 2, 1, 3))
                ),
            ),
            _pauli_16,
        ],
        17: [lambda: z(17)],
        18: [
            lambda: z(18),
            lambda: direct_product(z(3), z(6)),
            lambda: d(18),
            lambda: direct_product(z(3), d(6)),
            _named(
                "Dih(Z3xZ3)",
                lambda: semidirect_product(
                    direct_product(z(3), z(3)),
                    z(2),
                    _cyclic_action(2, _inversion_aut(direct_product(z(3), z(3)))),
                ),
            ),
        ],
        19: [lambda: z(19)],
        20: [
            lambda: z(20),
            lambda: direct_product(z(2), z(10)),
            lambda: d(20),
            lambda: dicyclic(20),
            lambda: semidirect_product(z(5), z(4), _cyclic_action(4, _cyclic_power_aut(5, 2))),
        ],
        21: [
            lambda: z(21),
            lambda: semidirect_product(z(7), z(3), _cyclic_action(3, _cyclic_power_aut(7, 2))),
        ],
        22: [lambda: z(22), lambda: d(22)],
        23: [lambda: z(23)],
        24: [
            lambda: z(24),
            lambda: direct_product(z(12), z(2)),
            lambda: direct_product(direct_product(z(2), z(2)), z(6)),
            lambda: symmetric(4),
            lambda: direct_product(alternating(4), z(2)),
            special_linear_2_3,
            lambda: d(24),
            lambda: dicyclic(24),
            lambda: semidirect_product(z(3), z(8), _cyclic_action(8, _inversion_aut(z(3)))),
            lambda: direct_product(z(3), d(8)),
            lambda: direct_product(z(3), dicyclic(8)),
            lambda: direct_product(z(2), d(12)),
            lambda: direct_product(z(2), dicyclic(12)),
            lambda: direct_product(z(4), d(6)),
            lambda: semidirect_product(z(3), d(8), _dihedral_parity_action(z(3), d(8))),
        ],
    }


@lru_cache(maxsize=None)
def catalog(order: int) -> tuple[Group, ...]:
    """All isomorphism classes of the given order, one representative each."""
    if not 1 <= order <= MAX_CATALOG_ORDER:
        raise GroupError(f"catalog covers orders 1..{MAX_CATALOG_ORDER}")
    groups = tuple(build() for build in _catalog_builders()[order])
    if len(groups) != CLASS_COUNTS[order - 1]:
        raise GroupError(
            f"catalog({order}) has {len(groups)} entries, expected {CLASS_COUNTS[order - 1]}"
        )
    vectors = [invariant_vector(g) for g in groups]
    if len(set(vectors)) != len(vectors):
        raise GroupError(f"catalog({order}) representatives are not pairwise distinct")
    return groups


def group_by_name(name: str) -> Group:
    for order in range(1, MAX_CATALOG_ORDER + 1):
        for g in catalog(order):
            if g.name == name:
                return g
    raise GroupError(f"no catalog group named {name!r}")


# ---------------------------------------------------------------------------
# interrogation


def element_orders(g: Group) -> list[int]:
    out = []
    for a in range(g.order):
        k, x = 1, a
        while x != 0:
            x = g.mul(x, a)
            k += 1
        out.append(k)
    return out


def center(g: Group) -> tuple[int, ...]:
    n = g.order
    return tuple(
        a for a in range(n) if all(g.mul(a, b) == g.mul(b, a) for b in range(n))
    )


def _closure(g: Group, seed: Iterable[int]) -> frozenset[int]:
    elems = set(seed) | {0}
    frontier = list(elems)
    while frontier:
        a = frontier.pop()
        for b in tuple(elems):
            for prod in (g.mul(a, b), g.mul(b, a)):
                if prod not in elems:
                    elems.add(prod)
                    frontier.append(prod)
    return frozenset(elems)


def derived_subgroup(g: Group) -> tuple[int, ...]:
    comms = {
        g.mul(g.mul(a, b), g.inv(g.mul(b, a)))
        for a in range(g.order)
        for b in range(g.order)
    }
    return tuple(sorted(_closure(g, comms)))


def conjugacy_class_count(g: Group) -> int:
    seen = [False] * g.order
    count = 0
    for a in range(g.order):
        if seen[a]:
            continue
        count += 1
        for x in range(g.order):
            seen[g.mul(g.mul(x, a), g.inv(x))] = True
    return count


def invariant_vector(g: Group):
    """Isomorphism invariants used to certify catalog distinctness."""
    orders = element_orders(g)
    cen = center(g)
    der = derived_subgroup(g)
    squares = {g.mul(a, a) for a in range(g.order)}
    return (
        tuple(sorted(orders)),
        tuple(sorted(orders[a] for a in cen)),
        g.is_abelian,
        tuple(sorted(orders[a] for a in der)),
        len(squares),
        conjugacy_class_count(g),
    )


def sylow2_cyclic(g: Group) -> bool:
    """True iff the Sylow 2-subgroups are non-trivial and cyclic.

    For that it suffices to find an element whose order is the full 2-part
    of the group order.
    """
    two_part = 1
    n = g.order
    while n % 2 == 0:
        two_part *= 2
        n //= 2
    if two_part == 1:
        return False
    return any(o == two_part for o in element_orders(g))


@lru_cache(maxsize=None)
def _all_subgroups(g: Group) -> frozenset[frozenset[int]]:
    subs = {frozenset({0})}
    frontier = [frozenset({0})]
    while frontier:
        h = frontier.pop()
        for a in range(g.order):
            if a in h:
                continue
            nh = _closure(g, h | {a})
            if nh not in subs:
                subs.add(nh)
                frontier.append(nh)
    return frozenset(subs)


def subgroups(g: Group, order: int | None = None) -> list[Subgroup]:
    """All subgroups, optionally filtered by order, sorted for determinism."""
    subs = [tuple(sorted(h)) for h in _all_subgroups(g)]
    if order is not None:
        subs = [h for h in subs if len(h) == order]
    return [Subgroup(g, h) for h in sorted(subs, key=lambda h: (len(h), h))]


def index2_subgroup_with_transversal(g: Group) -> Subgroup | None:
    """Index-2 subgroup whose own Sylow 2-subgroups are trivial or non-cyclic.

    By the complete-mapping criterion this is exactly an index-2 subgroup
    whose Cayley table has a transversal.  Returns the first qualifying
    subgroup in deterministic order, or None.
    """
    if g.order % 2:
        return None
    for h in subgroups(g, g.order // 2):
        if not sylow2_cyclic(h.as_group()):
            return h
    return None


# ---------------------------------------------------------------------------
# file format: first line the order, then n lines of n element indices


def write_group_file(g: Group, path: str | Path) -> None:
    lines = [str(g.order)]
    lines += [" ".join(map(str, row)) for row in g.table]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_group_text(text: str, name: str = "input") -> Group:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 1:
        raise GroupError("first line must hold the order alone")
    try:
        n = int(rows[0][0])
        table = [[int(v) for v in row] for row in rows[1:]]
    except ValueError as exc:
        raise GroupError(f"non-integer entry: {exc}") from None
    if len(table) != n:
        raise GroupError(f"expected {n} rows, found {len(table)}")
    return make_group(table, name)


def read_group_file(path: str | Path) -> Group:
    p = Path(path)
    return parse_group_text(p.read_text(), name=p.stem)
