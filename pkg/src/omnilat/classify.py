"""Which maximal partial transversal lengths does a group's Cayley table admit?

The pipeline layers four kinds of evidence, cheapest first:

1. rules: algebraic conditions that forbid a length outright (no search);
2. constructions: subgroup-block transversals for length n/2 and the
   subsquare recipe of every_second_witness for lengths n/2 + 2x;
3. complementary windows: in the middle band, a maximal partial transversal
   of length ell leaves an (n-ell) x (n-ell) window of unused rows and
   columns carrying at most ell distinct symbols, so enumerating those
   windows and running one targeted search per survivor settles the length;
4. direct search with the transversal preplaced at the identity cell.

A length is reported with the provenance that settled it (rule name or
search/construction tag), so reports double as an audit trail.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from . import engine
from .engine import (
    ABSENT,
    ACHIEVED,
    FORBIDDEN,
    TIMEOUT,
    LengthStatus,
    SearchBudget,
    SpectrumReport,
    abelian_symbol_sum,
    default_budget,
    find_maximal_of_length,
    find_partial_of_length,
    find_transversal,
    is_maximal,
    is_partial_transversal,
    length_range,
)
from .constructions import every_second_witness
from .groups import Group, Subgroup, catalog, index2_subgroup_with_transversal, subgroups, sylow2_cyclic
from .latin import LatinSquare, Triple, square_hash, window
from .subsquares import extend_general

RULE_NO_TRANSVERSAL = "transgrp"
RULE_NO_ABELIAN_NEAR = "noabelpanmax"
RULE_HALF = "halfn"
RULE_SMALL = "nosmallingrp"
RULE_T4N2 = "t4n2"

HOW_DIRECT = "direct-search"
HOW_EVERY_SECOND = "everysecond-construction"
HOW_SUBSQUARE = "subsquare-transversal"
HOW_WINDOW = "complementary-window"


@dataclass(frozen=True)
class LengthVerdict:
    """A LengthStatus plus classification provenance (forbidding rule or method)."""

    length: int
    status: str
    witness: tuple[Triple, ...] | None = None
    reason: str | None = None
    nodes: int = 0
    millis: float = 0.0
    rule: str | None = None
    how: str | None = None


def _cayley_square(g: Group) -> LatinSquare:
    return LatinSquare(tuple(tuple(r) for r in g.table))


def forbidden_lengths(g: Group) -> dict[int, str]:
    """Lengths no maximal partial transversal of this table can have, by rule.

    transgrp: length n needs a complete mapping, impossible iff the Sylow
    2-subgroup is non-trivial cyclic.  noabelpanmax: an abelian table with a
    transversal has no maximal near-transversal.  halfn: length n/2 needs an
    index-2 subgroup whose table has a transversal.  nosmallingrp: any
    length below 3n/5 needs n even, an index-2 subgroup, and even ell - n/2.
    t4n2: for n = 2 mod 4, a table with a transversal loses length n/2
    (vacuous for groups, whose Sylow 2-subgroup is then cyclic; kept for
    completeness of the rule set).
    """
    n = g.order
    lo, hi = length_range(n)
    out: dict[int, str] = {}
    no_transversal = sylow2_cyclic(g)
    if no_transversal:
        out[n] = RULE_NO_TRANSVERSAL
    if g.is_abelian and not no_transversal and n >= 2:
        out[n - 1] = RULE_NO_ABELIAN_NEAR
    if n % 2 == 0:
        if index2_subgroup_with_transversal(g) is None:
            out[n // 2] = RULE_HALF
        if n % 4 == 2 and not no_transversal:
            out[n // 2] = RULE_T4N2
    has_index2 = n % 2 == 0 and bool(subgroups(g, n // 2))
    for ell in range(lo, hi + 1):
        if ell in out or 5 * ell >= 3 * n:
            continue
        if n % 2 == 1 or not has_index2 or (ell - n // 2) % 2 == 1:
            if not (n % 2 == 0 and ell == n // 2):
                out[ell] = RULE_SMALL
    return out


@dataclass(frozen=True)
class ComplementCandidate:
    """Unused-rows x unused-cols window of a hypothetical maximal transversal.

    Both sets contain the identity (any maximal partial transversal can be
    translated so its free row and free column sets do) and the window
    carries at most ell symbols, since every one must be blocked.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    symbols: frozenset[int]


def complement_candidates(g: Group, ell: int):
    """All (n-ell)-row x (n-ell)-column windows through 0 with at most ell symbols.

    Columns are grown one at a time in ascending order; the symbol set only
    grows, so a prefix already past ell symbols is abandoned.
    """
    n = g.order
    k = n - ell
    if k <= 0:
        return
    table = g.table

    def grow(rows, cols, syms):
        if len(cols) == k:
            yield ComplementCandidate(rows, tuple(cols), frozenset(syms))
            return
        start = cols[-1] + 1
        # enough columns must remain to fill the window
        for c in range(start, n - (k - len(cols)) + 1):
            added = {table[r][c] for r in rows} - syms
            if len(syms) + len(added) <= ell:
                cols.append(c)
                yield from grow(rows, cols, syms | added)
                cols.pop()

    for extra in combinations(range(1, n), k - 1):
        rows = (0,) + extra
        base = {table[r][0] for r in rows}
        if len(base) <= ell:
            yield from grow(rows, [0], base)


def viability_filter(g: Group, ell: int, c: ComplementCandidate) -> tuple[bool, str | None]:
    """(viable?, prune reason).  Cheap algebra that kills most candidates.

    When the window is dense enough (3(n-ell) > 2|Z|) it must extend to a
    subsquare of order |Z|; a Cayley table only has subsquares of subgroup
    order, and an order-n/2 subsquare forces the block-parity situation that
    the even lengths n/2 + 2x already cover constructively.
    """
    n = g.order
    m = len(c.symbols)
    if m >= n:
        return False, "window-spans-all-symbols"
    if 3 * (n - ell) <= 2 * m:
        return True, None
    win = extend_general(g, set(c.rows), set(c.cols))
    assert win is not None, "guaranteed extension failed"
    assert len(win.rows) == m
    if not subgroups(g, m):
        return False, "no-subgroup-of-window-order"
    if 2 * m == n:
        if (ell - m) % 2 == 0:
            return False, "even-offset-covered-constructively"
        return False, "odd-offset-parity-impossible"
    return True, None


def _symbol_sum_feasible(g: Group, required: frozenset[int], rows, cols, ell: int) -> bool:
    """Can ell - |required| extra symbols outside `required` hit the forced sum?

    In an abelian table the symbols of a partial transversal fold to the
    fold of its rows plus its columns, so the complement of the required
    set must contain a subset of the right size and fold; a dynamic program
    over (count, fold) decides that exactly.
    """
    target = abelian_symbol_sum(g, rows, cols)
    acc = 0
    for s in required:
        acc = g.mul(acc, s)
    target = g.mul(g.inv(acc), target)
    k = ell - len(required)
    pool = [s for s in range(g.order) if s not in required]
    feasible = [[False] * g.order for _ in range(k + 1)]
    feasible[0][0] = True
    for e in pool:
        for cnt in range(k - 1, -1, -1):
            row = feasible[cnt]
            nxt = feasible[cnt + 1]
            for val in range(g.order):
                if row[val]:
                    nxt[g.mul(val, e)] = True
    return feasible[k][target]


def targeted_search(
    g: Group, ell: int, c: ComplementCandidate, budget: SearchBudget
) -> LengthStatus:
    """Decide whether a maximal transversal of length ell has complement window c.

    The used rows, used columns and window symbols are all forced.  For
    abelian groups the symbol-fold condition is checked first: when no
    symbol completion can reach the forced fold, the candidate dies without
    any search.
    """
    n = g.order
    used_rows = [r for r in range(n) if r not in c.rows]
    used_cols = [col for col in range(n) if col not in c.cols]
    if g.is_abelian:
        if not _symbol_sum_feasible(g, c.symbols, used_rows, used_cols, ell):
            return LengthStatus(ell, ABSENT, None, "symbol-sum-infeasible")
        target = abelian_symbol_sum(g, used_rows, used_cols)
        return find_maximal_of_length(
            _cayley_square(g), ell, budget,
            forced_rows=used_rows, forced_cols=used_cols,
            required_symbols=c.symbols, group=g, symbol_sum=target,
        )
    return find_maximal_of_length(
        _cayley_square(g), ell, budget,
        forced_rows=used_rows, forced_cols=used_cols, required_symbols=c.symbols,
    )


def _verdict_from_status(st: LengthStatus, how: str) -> LengthVerdict:
    return LengthVerdict(
        st.length, st.status, st.witness, st.reason, st.nodes, st.millis,
        how=how if st.status == ACHIEVED else None,
    )


def _half_length_witness(g: Group, h: Subgroup) -> tuple[Triple, ...]:
    """Transversal of the rows-H x cols-H block: maximal of length n/2.

    The complementary block repeats the subgroup's symbols, so nothing
    outside the block extends the transversal.
    """
    sub = h.as_group()
    els = sorted(h.elements)
    st = find_transversal(_cayley_square(sub))
    assert st.status == ACHIEVED
    square = _cayley_square(g)
    out = tuple(sorted((els[r], els[c], els[s]) for r, c, s in st.witness))
    assert is_partial_transversal(square, out) and is_maximal(square, out)
    return out


def _near_transversal_of_block(g: Group, h: Subgroup) -> tuple[Triple, ...]:
    """A near-transversal of the subgroup block, lifted to parent coordinates."""
    sub = h.as_group()
    els = sorted(h.elements)
    st = find_partial_of_length(_cayley_square(sub), sub.order - 1, SearchBudget.exhaustive())
    assert st.status == ACHIEVED, "every group table has a near-transversal"
    return tuple(sorted((els[r], els[c], els[s]) for r, c, s in st.witness))


def classify_group(
    g: Group, budget: SearchBudget | None = None, *, band_budget: SearchBudget | None = None
) -> SpectrumReport:
    """Classify every length for one group, merging rules, constructions and search.

    Returns a SpectrumReport whose statuses are LengthVerdict objects; each
    carries either the rule that forbids the length or the method that
    achieved it.
    """
    n = g.order
    if budget is None:
        budget = default_budget(n)
    lo, hi = length_range(n)
    t0 = time.perf_counter()
    square = _cayley_square(g)
    verdicts: dict[int, LengthVerdict] = {}

    for ell, rule in forbidden_lengths(g).items():
        verdicts[ell] = LengthVerdict(ell, FORBIDDEN, reason=rule, rule=rule)

    if hi not in verdicts:
        st = find_transversal(square, budget, preplaced=[(0, 0)])
        verdicts[hi] = _verdict_from_status(st, HOW_DIRECT)

    half = n // 2
    if n % 2 == 0 and half not in verdicts and half >= lo:
        h = index2_subgroup_with_transversal(g)
        if h is not None:
            w = _half_length_witness(g, h)
            verdicts[half] = LengthVerdict(half, ACHIEVED, w, how=HOW_SUBSQUARE)

    if n % 2 == 0 and n >= 8:
        index2 = subgroups(g, half)
        wanted = [
            x
            for x in range(1, n // 8 + 1)
            if half + 2 * x not in verdicts and lo <= half + 2 * x <= hi
        ]
        if index2 and wanted:
            h = index2[0]
            els = sorted(h.elements)
            win = window(square, els, els)
            near = _near_transversal_of_block(g, h)
            for x in wanted:
                w = every_second_witness(square, win, near, x)
                verdicts[half + 2 * x] = LengthVerdict(
                    half + 2 * x, ACHIEVED, w, how=HOW_EVERY_SECOND
                )

    band_lo = -(-3 * n // 5)
    band_hi = (2 * (n + 1)) // 3
    for ell in range(band_lo, min(band_hi, hi) + 1):
        if ell in verdicts or ell < lo:
            continue
        verdicts[ell] = _band_length(g, ell, band_budget or budget)

    for ell in range(lo, hi + 1):
        if ell in verdicts:
            continue
        st = find_maximal_of_length(square, ell, budget, preplaced=[(0, 0)])
        verdicts[ell] = _verdict_from_status(st, HOW_DIRECT)

    return SpectrumReport(
        order=n,
        square_hash=square_hash(square),
        low=lo,
        high=hi,
        statuses=dict(sorted(verdicts.items())),
        label=g.name,
        elapsed=time.perf_counter() - t0,
    )


PROBE_NODES = 300_000


def _band_length(g: Group, ell: int, budget: SearchBudget) -> LengthVerdict:
    """Settle one middle-band length through the complementary-window pipeline.

    Two passes over the viable candidates: a node-capped probe first, since
    an achievable length usually reveals a witness within a few candidate
    windows, then full-budget exhaustion of whatever the probes left open.
    """
    nodes = 0
    t0 = time.perf_counter()
    candidates = pruned = searched = 0
    viable: list[ComplementCandidate] = []
    for cand in complement_candidates(g, ell):
        candidates += 1
        ok, _reason = viability_filter(g, ell, cand)
        if ok:
            viable.append(cand)
        else:
            pruned += 1

    def achieved_verdict(st: LengthStatus) -> LengthVerdict:
        return LengthVerdict(
            ell, ACHIEVED, st.witness, nodes=nodes,
            millis=(time.perf_counter() - t0) * 1000.0, how=HOW_WINDOW,
        )

    probe_cap = PROBE_NODES
    if budget.node_limit is not None:
        probe_cap = min(probe_cap, budget.node_limit)
    probe = SearchBudget(node_limit=probe_cap, wall_secs=budget.wall_secs)
    open_candidates: list[ComplementCandidate] = []
    for cand in viable:
        searched += 1
        st = targeted_search(g, ell, cand, probe)
        nodes += st.nodes
        if st.status == ACHIEVED:
            return achieved_verdict(st)
        if st.status == TIMEOUT:
            open_candidates.append(cand)

    timed_out = False
    for cand in open_candidates:
        st = targeted_search(g, ell, cand, budget)
        nodes += st.nodes
        if st.status == ACHIEVED:
            return achieved_verdict(st)
        if st.status == TIMEOUT:
            timed_out = True

    ms = (time.perf_counter() - t0) * 1000.0
    if timed_out:
        return LengthVerdict(ell, TIMEOUT, nodes=nodes, millis=ms)
    reason = (
        "no-complement-candidate"
        if candidates == 0
        else f"windows-eliminated({candidates} candidates, {pruned} pruned, {searched} searched)"
    )
    return LengthVerdict(ell, ABSENT, reason=reason, nodes=nodes, millis=ms)


def classify_order(
    order: int, budget: SearchBudget | None = None, *, jobs: int = 1
) -> list[tuple[Group, SpectrumReport]]:
    """Classify every isomorphism class of the given order."""
    gs = catalog(order)
    if jobs > 1 and len(gs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(
                pool.map(
                    _classify_task,
                    [(order, i, budget) for i in range(len(gs))],
                )
            )
        return list(zip(gs, reports))
    return [(g, classify_group(g, budget)) for g in gs]


def _classify_task(task):
    order, idx, budget = task
    return classify_group(catalog(order)[idx], budget)


def missing_pairs(results) -> list[tuple[str, int]]:
    """(group name, length) for every non-achieved length, mirroring the census layout."""
    out = []
    for g, rep in results:
        for ell in rep.missing:
            out.append((g.name, ell))
    return out
