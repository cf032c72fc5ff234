"""Maximal partial transversal search over a fixed Latin square.

A partial transversal is a set of cells with pairwise distinct rows, columns
and symbols; it is maximal when no free cell (unused row, unused column,
unused symbol) remains anywhere in the square.  For a square of order n the
lengths of maximal partial transversals live in [ceil(n/2), n].  This module
answers "is there a maximal partial transversal of length ell" per length and
aggregates the answers into a spectrum report, delegating the inner DFS to
omnilat._kernels.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import _kernels
from .groups import Group
from .latin import LatinSquare, Triple, square_hash

EXHAUSTIVE_MAX_ORDER = 10
DEFAULT_NODE_LIMIT = 10**8
BUDGET_REQUIRED_ORDER = 17

ACHIEVED = "achieved"
ABSENT = "proven-absent"
TIMEOUT = "timeout"
FORBIDDEN = "forbidden"  # only emitted by rule-based classification, never by search


class BudgetRequired(RuntimeError):
    """Raised when a search above the default-budget range has no explicit budget."""


class LengthOutOfRange(ValueError):
    """Raised for target lengths outside [ceil(n/2), n]."""


@dataclass(frozen=True)
class SearchBudget:
    """Node and wall-clock caps for one length-targeted search.

    Both fields None means exhaustive: the search runs to completion and
    absence verdicts are proofs.  With either cap set, exceeding it yields
    status "timeout" and no verdict for that length.
    """

    node_limit: int | None = None
    wall_secs: float | None = None

    @classmethod
    def exhaustive(cls) -> "SearchBudget":
        return cls()

    @property
    def is_exhaustive(self) -> bool:
        return self.node_limit is None and self.wall_secs is None


def default_budget(n: int) -> SearchBudget:
    """Budget policy by order: exhaustive to 10, node-capped to 16, then explicit."""
    if n <= EXHAUSTIVE_MAX_ORDER:
        return SearchBudget.exhaustive()
    if n < BUDGET_REQUIRED_ORDER:
        return SearchBudget(node_limit=DEFAULT_NODE_LIMIT)
    raise BudgetRequired(
        f"order {n} needs an explicit SearchBudget (node_limit and/or wall_secs)"
    )


def length_range(n: int) -> tuple[int, int]:
    """Closed interval of possible maximal partial transversal lengths."""
    return math.ceil(n / 2), n


@dataclass(frozen=True)
class LengthStatus:
    """Outcome of one length: achieved with a witness, proven absent, or timeout."""

    length: int
    status: str
    witness: tuple[Triple, ...] | None = None
    reason: str | None = None
    nodes: int = 0
    millis: float = 0.0


def _masks(triples) -> tuple[int, int, int]:
    rm = cm = sm = 0
    for r, c, s in triples:
        if rm >> r & 1 or cm >> c & 1 or sm >> s & 1:
            raise ValueError("repeated row, column or symbol")
        rm |= 1 << r
        cm |= 1 << c
        sm |= 1 << s
    return rm, cm, sm


def is_partial_transversal(square: LatinSquare, triples) -> bool:
    """True when the triples are cells of the square with no shared coordinate."""
    triples = tuple(triples)
    try:
        _masks(triples)
    except ValueError:
        return False
    n = square.n
    for r, c, s in triples:
        if not (0 <= r < n and 0 <= c < n) or square.grid[r][c] != s:
            return False
    return True


def free_cells(square: LatinSquare, triples):
    """Cells extending the partial transversal, in row-major order."""
    rm, cm, sm = _masks(triples)
    for r in range(square.n):
        if rm >> r & 1:
            continue
        row = square.grid[r]
        for c in range(square.n):
            if not cm >> c & 1 and not sm >> row[c] & 1:
                yield (r, c, row[c])


def is_maximal(square: LatinSquare, triples) -> bool:
    """True when the partial transversal admits no free cell anywhere."""
    if not is_partial_transversal(square, triples):
        raise ValueError("not a partial transversal of this square")
    return next(free_cells(square, triples), None) is None


def extend_greedy(square: LatinSquare, triples=()) -> tuple[Triple, ...]:
    """Grow to a maximal partial transversal, taking the first free cell each pass."""
    if not is_partial_transversal(square, triples):
        raise ValueError("not a partial transversal of this square")
    out = list(triples)
    while True:
        cell = next(free_cells(square, out), None)
        if cell is None:
            return tuple(sorted(out))
        out.append(cell)


def _run_kernel(
    square: LatinSquare,
    length: int,
    budget: SearchBudget,
    *,
    forced_rows=(),
    forced_cols=(),
    required_symbols=(),
    forbidden_cells=(),
    preplaced=(),
    maximal=True,
    group: Group | None = None,
    symbol_sum: int | None = None,
) -> LengthStatus:
    n = square.n
    fr = fc = rs = 0
    for r in forced_rows:
        fr |= 1 << r
    for c in forced_cols:
        fc |= 1 << c
    for s in required_symbols:
        rs |= 1 << s
    forb = tuple(r * n + c for r, c in forbidden_cells)
    flat = square.flat()
    gflat = None
    if symbol_sum is not None:
        if group is None:
            raise ValueError("symbol_sum needs the group table")
        gflat = [s for row in group.table for s in row]
    t0 = time.perf_counter()
    code, wit, nodes = _kernels.search(
        n,
        flat,
        length,
        forced_rows=fr,
        forced_cols=fc,
        required_syms=rs,
        forbidden=forb,
        preplaced=tuple(preplaced),
        require_maximal=maximal,
        node_limit=-1 if budget.node_limit is None else budget.node_limit,
        time_limit=-1.0 if budget.wall_secs is None else budget.wall_secs,
        group=gflat,
        sum_target=-1 if symbol_sum is None else symbol_sum,
    )
    ms = (time.perf_counter() - t0) * 1000.0
    if code == _kernels.ACHIEVED:
        return LengthStatus(length, ACHIEVED, tuple(wit), None, nodes, ms)
    if code == _kernels.EXHAUSTED:
        return LengthStatus(length, ABSENT, None, "exhausted", nodes, ms)
    return LengthStatus(length, TIMEOUT, None, None, nodes, ms)


def find_maximal_of_length(
    square: LatinSquare, length: int, budget: SearchBudget | None = None, **kw
) -> LengthStatus:
    """Search for a maximal partial transversal of exactly this length.

    Keyword constraints: forced_rows / forced_cols / required_symbols
    (must appear), forbidden_cells ((r, c) pairs the transversal must avoid),
    preplaced ((r, c) cells it must contain), group + symbol_sum (only
    accept leaves whose symbols fold to the target under the group law).
    """
    lo, hi = length_range(square.n)
    if not lo <= length <= hi:
        raise LengthOutOfRange(f"length {length} outside [{lo}, {hi}] for order {square.n}")
    if budget is None:
        budget = default_budget(square.n)
    return _run_kernel(square, length, budget, maximal=True, **kw)


def find_partial_of_length(
    square: LatinSquare, length: int, budget: SearchBudget | None = None, **kw
) -> LengthStatus:
    """Like find_maximal_of_length without the maximality and range demands."""
    if not 0 <= length <= square.n:
        raise LengthOutOfRange(f"length {length} outside [0, {square.n}]")
    if budget is None:
        budget = default_budget(square.n)
    return _run_kernel(square, length, budget, maximal=False, **kw)


_SCRAMBLE_SEED = 0x5EED


def find_transversal(
    square: LatinSquare,
    budget: SearchBudget | None = None,
    *,
    forbidden_cells=(),
    preplaced=(),
) -> LengthStatus:
    """First-found full transversal, searched on a fixed-seed isotopic scramble.

    Row-major search on highly structured squares (Cayley tables in
    particular) can wander through enormous dead subtrees; permuting rows
    and columns first breaks that structure while bijecting transversals,
    so the answer is exact and still deterministic.  Constraint cells are
    mapped into the scrambled frame and witnesses mapped back.
    """
    n = square.n
    rng = random.Random(_SCRAMBLE_SEED)
    pr = list(range(n))
    rng.shuffle(pr)
    pc = list(range(n))
    rng.shuffle(pc)
    inv_r = [0] * n
    inv_c = [0] * n
    for i in range(n):
        inv_r[pr[i]] = i
        inv_c[pc[i]] = i
    scrambled = LatinSquare(
        tuple(tuple(square.grid[pr[r]][pc[c]] for c in range(n)) for r in range(n))
    )
    st = _run_kernel(
        scrambled,
        n,
        budget or SearchBudget.exhaustive(),
        forbidden_cells=[(inv_r[r], inv_c[c]) for r, c in forbidden_cells],
        preplaced=[(inv_r[r], inv_c[c]) for r, c in preplaced],
    )
    if st.witness is None:
        return st
    back = tuple(sorted((pr[r], pc[c], s) for r, c, s in st.witness))
    return LengthStatus(st.length, st.status, back, st.reason, st.nodes, st.millis)


@dataclass
class SpectrumReport:
    """Per-length outcomes for one square over the full possible range."""

    order: int
    square_hash: str
    low: int
    high: int
    statuses: dict[int, LengthStatus] = field(default_factory=dict)
    backend: str = _kernels.backend_name
    label: str | None = None
    elapsed: float = 0.0

    @property
    def achieved(self) -> list[int]:
        return [l for l in range(self.low, self.high + 1) if self.statuses[l].status == ACHIEVED]

    @property
    def missing(self) -> list[int]:
        return [
            l
            for l in range(self.low, self.high + 1)
            if self.statuses[l].status in (ABSENT, FORBIDDEN)
        ]

    @property
    def undecided(self) -> list[int]:
        return [l for l in range(self.low, self.high + 1) if self.statuses[l].status == TIMEOUT]

    @property
    def verdict(self) -> str:
        """omniversal / near-omniversal / other, or undecided under a timeout."""
        if self.undecided:
            return "undecided"
        k = len(self.missing)
        return "omniversal" if k == 0 else "near-omniversal" if k == 1 else "other"

    @property
    def mu(self) -> int | None:
        """The unique unattained length when the verdict is near-omniversal."""
        return self.missing[0] if self.verdict == "near-omniversal" else None


def _worker(task):
    n, flat, length, node_limit, wall_secs = task
    square = LatinSquare(tuple(tuple(flat[r * n : (r + 1) * n]) for r in range(n)))
    budget = SearchBudget(node_limit=node_limit, wall_secs=wall_secs)
    return length, _run_kernel(square, length, budget)


def spectrum(
    square: LatinSquare,
    budget: SearchBudget | None = None,
    *,
    jobs: int = 1,
    label: str | None = None,
) -> SpectrumReport:
    """Decide every length in [ceil(n/2), n] for one square.

    The budget applies per length.  The top length runs first: for orders
    n = 4m + 2 a square with a transversal has no maximal partial
    transversal of length 2m + 1, so under a capped budget that length is
    settled without search when the transversal turns up.  An exhaustive
    budget always searches, so absence verdicts are uniformly search proofs.
    """
    n = square.n
    if budget is None:
        budget = default_budget(n)
    lo, hi = length_range(n)
    t0 = time.perf_counter()
    statuses: dict[int, LengthStatus] = {}
    statuses[hi] = _run_kernel(square, hi, budget)

    lengths = list(range(lo, hi))
    if n % 4 == 2 and statuses[hi].status == ACHIEVED and not budget.is_exhaustive:
        half = n // 2
        statuses[half] = LengthStatus(half, ABSENT, None, "t4n2")
        lengths.remove(half)

    if jobs > 1 and len(lengths) > 1:
        flat = square.flat()
        tasks = [(n, flat, l, budget.node_limit, budget.wall_secs) for l in lengths]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for length, status in pool.map(_worker, tasks):
                statuses[length] = status
    else:
        for length in lengths:
            statuses[length] = _run_kernel(square, length, budget)

    return SpectrumReport(
        order=n,
        square_hash=square_hash(square),
        low=lo,
        high=hi,
        statuses=dict(sorted(statuses.items())),
        label=label,
        elapsed=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class Isotopy:
    """Row, column and symbol bijections acting as g[pr[r]][pc[c]] = ps[g[r][c]]."""

    row: tuple[int, ...]
    col: tuple[int, ...]
    sym: tuple[int, ...]

    def apply_triple(self, t: Triple) -> Triple:
        return (self.row[t[0]], self.col[t[1]], self.sym[t[2]])


def normalize_to_identity(group: Group, triples, anchor: Triple | None = None):
    """Translate a partial transversal of a Cayley table so one cell is (0, 0, 0).

    Left-multiplying rows by r0^-1 and right-multiplying columns by c0^-1
    fixes the table as a square and carries the anchor triple (r0, c0, r0 c0)
    to the identity cell.  Returns (Isotopy, mapped triples sorted).
    """
    triples = tuple(sorted(triples))
    if not triples:
        raise ValueError("empty partial transversal")
    r0, c0, s0 = anchor if anchor is not None else triples[0]
    if group.table[r0][c0] != s0:
        raise ValueError("anchor is not a cell of the Cayley table")
    n = group.order
    ri, ci = group.inv(r0), group.inv(c0)
    iso = Isotopy(
        row=tuple(group.mul(ri, a) for a in range(n)),
        col=tuple(group.mul(b, ci) for b in range(n)),
        sym=tuple(group.mul(ri, group.mul(x, ci)) for x in range(n)),
    )
    for a in range(n):
        for b in range(n):
            assert group.table[iso.row[a]][iso.col[b]] == iso.sym[group.table[a][b]]
    return iso, tuple(sorted(iso.apply_triple(t) for t in triples))


def abelian_symbol_sum(group: Group, rows, cols) -> int:
    """Sum of the row and column indices in an abelian group.

    Any partial transversal of the Cayley table using exactly these rows and
    columns has symbols summing to this value, since each of its cells
    contributes row + column.  Used as the symbol-sum search target.
    """
    if not group.is_abelian:
        raise ValueError("symbol sums constrain abelian tables only")
    acc = 0
    for r in rows:
        acc = group.mul(acc, r)
    for c in cols:
        acc = group.mul(acc, c)
    return acc
