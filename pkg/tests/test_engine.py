import json
import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from oracles import maximal_pt_lengths, maximal_pts_of_length
from omnilat.constructions import build_l_star
from omnilat.engine import (
    ABSENT,
    ACHIEVED,
    TIMEOUT,
    BudgetRequired,
    LengthOutOfRange,
    SearchBudget,
    abelian_symbol_sum,
    default_budget,
    extend_greedy,
    find_maximal_of_length,
    find_partial_of_length,
    find_transversal,
    free_cells,
    is_maximal,
    is_partial_transversal,
    length_range,
    normalize_to_identity,
    spectrum,
)
from omnilat.groups import catalog, cyclic, group_by_name
from omnilat.latin import LatinSquare, from_rows


def cayley(g) -> LatinSquare:
    return LatinSquare(tuple(tuple(r) for r in g.table))


def test_length_range_endpoints():
    assert length_range(1) == (1, 1)
    assert length_range(7) == (4, 7)
    assert length_range(8) == (4, 8)


def test_default_budget_policy():
    assert default_budget(10).is_exhaustive
    assert default_budget(11).node_limit == 10**8
    with pytest.raises(BudgetRequired):
        default_budget(17)


def test_predicates_and_free_cells():
    sq = cayley(cyclic(4))
    pt = ((0, 0, 0), (1, 1, 2))
    assert is_partial_transversal(sq, pt)
    assert not is_partial_transversal(sq, ((0, 0, 0), (0, 1, 1)))
    assert not is_partial_transversal(sq, ((0, 0, 1),))
    cells = list(free_cells(sq, pt))
    assert all(sq.grid[r][c] == s for r, c, s in cells)
    grown = extend_greedy(sq, pt)
    assert is_maximal(sq, grown)


def test_find_maximal_rejects_out_of_range_lengths():
    sq = cayley(cyclic(5))
    with pytest.raises(LengthOutOfRange):
        find_maximal_of_length(sq, 2)
    with pytest.raises(LengthOutOfRange):
        find_maximal_of_length(sq, 6)


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6, 7])
def test_spectrum_matches_unpruned_oracle_per_group(order):
    for g in catalog(order):
        sq = cayley(g)
        rep = spectrum(sq, SearchBudget.exhaustive())
        assert rep.achieved == maximal_pt_lengths([list(r) for r in g.table]), g.name
        assert not rep.undecided


def test_witnesses_returned_are_verifiably_maximal():
    sq = cayley(group_by_name("D8"))
    for ell in (4, 6, 7, 8):
        st_ = find_maximal_of_length(sq, ell)
        assert st_.status == ACHIEVED
        assert len(st_.witness) == ell
        assert is_maximal(sq, st_.witness)


def test_absence_agrees_with_oracle_on_specific_length():
    sq = cayley(group_by_name("Q8"))
    st_ = find_maximal_of_length(sq, 5)
    assert st_.status == ABSENT
    assert maximal_pts_of_length([list(r) for r in sq.grid], 5) == []


def test_node_cap_reports_timeout():
    sq = cayley(group_by_name("Z8"))
    st_ = find_maximal_of_length(sq, 4, SearchBudget(node_limit=1))
    assert st_.status == TIMEOUT
    assert st_.witness is None


def test_spectrum_half_shortcut_only_without_exhaustive_budget():
    from omnilat.constructions import build_m_star

    sq = build_m_star(2)  # order 10: default budget is exhaustive
    st_exh = spectrum(sq).statuses[5]
    assert st_exh.status == ABSENT and st_exh.reason == "exhausted"
    st_cap = spectrum(sq, SearchBudget(node_limit=10**7)).statuses[5]
    assert st_cap.status == ABSENT and st_cap.reason == "t4n2"


def test_preplaced_and_forbidden_constraints_respected():
    sq = build_l_star(1, 0)
    st_ = find_maximal_of_length(sq, 8, preplaced=[(2, 5)])
    assert st_.status == ACHIEVED and (2, 5, sq.grid[2][5]) in st_.witness
    st_ = find_maximal_of_length(sq, 8, forbidden_cells=[(0, c) for c in range(4)])
    if st_.status == ACHIEVED:
        assert all(not (r == 0 and c < 4) for r, c, _ in st_.witness)


def test_forced_rows_and_required_symbols():
    sq = cayley(group_by_name("D8"))
    st_ = find_maximal_of_length(sq, 6, forced_rows=[0, 1], required_symbols=[7])
    if st_.status == ACHIEVED:
        rows = {t[0] for t in st_.witness}
        syms = {t[2] for t in st_.witness}
        assert {0, 1} <= rows and 7 in syms


def test_find_transversal_maps_witness_back_to_original_square():
    sq = cayley(group_by_name("SL(2,3)"))
    st_ = find_transversal(sq, SearchBudget(node_limit=10**7))
    assert st_.status == ACHIEVED
    assert is_partial_transversal(sq, st_.witness)
    assert len(st_.witness) == 24


def test_find_transversal_honours_forbidden_and_preplaced():
    sq = build_l_star(1, 0)
    corners = [(0, 0), (0, 2), (2, 0), (2, 2)]
    st_ = find_transversal(sq, forbidden_cells=corners)
    assert st_.status == ACHIEVED
    assert not any((r, c) in corners for r, c, _ in st_.witness)
    st_ = find_transversal(sq, preplaced=[(3, 3)])
    assert st_.status == ACHIEVED
    assert (3, 3, sq.grid[3][3]) in st_.witness


def test_find_partial_of_length_skips_maximality():
    sq = cayley(cyclic(4))
    st_ = find_partial_of_length(sq, 1)
    assert st_.status == ACHIEVED and len(st_.witness) == 1
    # length 1 is never a maximal partial transversal at order 4
    assert find_maximal_of_length(sq, 4, preplaced=[(0, 0)]).status in (ACHIEVED, ABSENT)


def test_spectrum_parallel_jobs_match_serial():
    sq = build_l_star(1, 0)
    serial = spectrum(sq, SearchBudget.exhaustive())
    parallel = spectrum(sq, SearchBudget.exhaustive(), jobs=3)
    assert serial.achieved == parallel.achieved
    assert serial.missing == parallel.missing
    assert [s.nodes for s in serial.statuses.values()] == [
        s.nodes for s in parallel.statuses.values()
    ]


@given(st.sampled_from(["Z5", "Z7", "Z4xZ2", "D8"]), st.randoms(use_true_random=False))
def test_normalize_to_identity_preserves_structure(name, rnd):
    g = group_by_name(name)
    sq = cayley(g)
    n = g.order
    rng = random.Random(rnd.randrange(2**30))
    # random partial transversal by greedy over a shuffled cell order
    cells = [(r, c) for r in range(n) for c in range(n)]
    rng.shuffle(cells)
    picked, rm, cm, sm = [], set(), set(), set()
    for r, c in cells:
        s = g.table[r][c]
        if r not in rm and c not in cm and s not in sm:
            picked.append((r, c, s))
            rm.add(r), cm.add(c), sm.add(s)
        if len(picked) == n // 2:
            break
    iso, moved = normalize_to_identity(g, picked)
    assert (0, 0, 0) in moved
    assert len(moved) == len(picked)
    assert is_partial_transversal(sq, moved)
    was_max = is_maximal(sq, picked)
    assert is_maximal(sq, moved) == was_max


def test_abelian_symbol_sum_matches_transversal_fold():
    g = group_by_name("Z7")
    grid = [list(r) for r in g.table]
    for w in maximal_pts_of_length(grid, 5)[:40]:
        rows = [t[0] for t in w]
        cols = [t[1] for t in w]
        target = abelian_symbol_sum(g, rows, cols)
        fold = 0
        for _, _, s in w:
            fold = g.mul(fold, s)
        assert fold == target


def test_abelian_symbol_sum_rejects_nonabelian():
    with pytest.raises(ValueError):
        abelian_symbol_sum(group_by_name("D8"), [0], [0])


def test_pure_backend_agrees_with_active_backend():
    code = (
        "import json\n"
        "from omnilat import _kernels\n"
        "from omnilat.constructions import build_l_star\n"
        "from omnilat.engine import SearchBudget, spectrum\n"
        "from omnilat.groups import group_by_name\n"
        "from omnilat.latin import LatinSquare, species_key\n"
        "out = {'backend': _kernels.backend_name}\n"
        "rep = spectrum(build_l_star(1, 0), SearchBudget.exhaustive())\n"
        "out['lstar'] = [rep.achieved, rep.missing,"
        " [s.nodes for s in rep.statuses.values()]]\n"
        "g = group_by_name('Z7')\n"
        "sq = LatinSquare(tuple(tuple(r) for r in g.table))\n"
        "rep = spectrum(sq, SearchBudget.exhaustive())\n"
        "out['z7'] = [rep.achieved, rep.missing,"
        " [s.nodes for s in rep.statuses.values()]]\n"
        "out['skey'] = species_key(sq).hex()\n"
        "print(json.dumps(out))\n"
    )

    def run(pure: bool):
        env = dict(os.environ)
        if pure:
            env["OMNILAT_PURE"] = "1"
        else:
            env.pop("OMNILAT_PURE", None)
        res = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert res.returncode == 0, res.stderr
        return json.loads(res.stdout)

    compiled = run(pure=False)
    pure = run(pure=True)
    assert pure["backend"] == "pure"
    assert compiled["lstar"] == pure["lstar"]
    assert compiled["z7"] == pure["z7"]
    assert compiled["skey"] == pure["skey"]
