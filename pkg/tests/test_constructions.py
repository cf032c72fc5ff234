import pytest
from hypothesis import given, strategies as st

from oracles import is_maximal_ref
from omnilat.constructions import (
    EXCEPTIONAL_NAMES,
    LStarParams,
    TkqParams,
    build_l_star,
    build_m_star,
    congruence_solution,
    every_second_witness,
    exceptional_order8,
    l_star_witness,
    m_star_witness,
    three_fifths_witness,
)
from omnilat.engine import LengthOutOfRange, is_maximal, length_range, spectrum
from omnilat.groups import cyclic, group_by_name, subgroups
from omnilat.latin import LatinSquare, window

L8_ROWS = (
    (2, 1, 0, 3, 4, 5, 6, 7),
    (1, 0, 3, 2, 5, 4, 7, 6),
    (0, 3, 2, 1, 6, 7, 4, 5),
    (3, 2, 1, 0, 7, 6, 5, 4),
    (4, 5, 6, 7, 0, 1, 2, 3),
    (5, 4, 7, 6, 1, 0, 3, 2),
    (6, 7, 4, 5, 2, 3, 0, 1),
    (7, 6, 5, 4, 3, 2, 1, 0),
)

M6_ROWS = (
    (3, 2, 4, 1, 0, 5),
    (2, 4, 0, 3, 5, 1),
    (4, 0, 2, 5, 1, 3),
    (1, 3, 5, 2, 4, 0),
    (0, 5, 1, 4, 3, 2),
    (5, 1, 3, 0, 2, 4),
)


def cayley(g) -> LatinSquare:
    return LatinSquare(tuple(tuple(r) for r in g.table))


def test_smallest_full_range_square_is_the_published_grid():
    assert build_l_star(1, 0).grid == L8_ROWS


def test_l_star_orders_and_validity():
    for m, q in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)]:
        sq = build_l_star(m, q)
        assert sq.n == 8 * m + 4 * q


def test_l_star_params_validation():
    with pytest.raises(ValueError):
        LStarParams(0, 0)
    with pytest.raises(ValueError):
        LStarParams(1, 2)
    with pytest.raises(ValueError):
        build_l_star(1, -1)


def test_core_family_band_limits():
    with pytest.raises(ValueError):
        TkqParams(1, 0, 0)  # below 1 - q
    with pytest.raises(ValueError):
        TkqParams(1, 0, 3)  # above 4m + q - 2
    TkqParams(1, 1, 0)
    TkqParams(2, 1, 7)


@pytest.mark.parametrize("m,q", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_l_star_witness_every_admissible_length(m, q):
    sq = build_l_star(m, q)
    lo, hi = length_range(sq.n)
    for ell in range(lo, hi + 1):
        w = l_star_witness(m, q, ell)
        assert len(w) == ell
        assert is_maximal(sq, w)


def test_l_star_witness_rejects_out_of_range():
    with pytest.raises(LengthOutOfRange):
        l_star_witness(1, 0, 3)
    with pytest.raises(LengthOutOfRange):
        l_star_witness(1, 0, 9)


def test_l_star_smallest_case_is_omniversal():
    rep = spectrum(build_l_star(1, 0))
    assert rep.verdict == "omniversal"
    assert rep.achieved == [4, 5, 6, 7, 8]


def test_m_star_smallest_grids():
    assert build_m_star(0).grid == ((1, 0), (0, 1))
    assert build_m_star(1).grid == M6_ROWS


def test_m_star_orders_and_validity():
    for m in range(5):
        assert build_m_star(m).n == 4 * m + 2
    with pytest.raises(ValueError):
        build_m_star(-1)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_m_star_witness_every_length_except_half(m):
    sq = build_m_star(m)
    n = 4 * m + 2
    for ell in range(2 * m + 2, n + 1):
        w = m_star_witness(m, ell)
        assert len(w) == ell
        assert is_maximal(sq, w)
    with pytest.raises(LengthOutOfRange) as exc:
        m_star_witness(m, 2 * m + 1)
    assert "half order" in str(exc.value)


def test_congruence_solution_characterises_achievable_offsets():
    m = 3
    for a in range(4 * m + 2):
        i = congruence_solution(a, m)
        if a % 4 == 2:
            assert i == m - (a - 2) // 4 and 1 <= i <= m
        else:
            assert i is None
    with pytest.raises(ValueError):
        congruence_solution(-1, m)
    with pytest.raises(ValueError):
        congruence_solution(4 * m + 2, m)


@pytest.mark.parametrize("name,x,expect", [("Z8", 1, 6), ("Z16", 1, 10), ("Z16", 2, 12)])
def test_every_second_witness_lengths(name, x, expect):
    g = group_by_name(name)
    sq = cayley(g)
    h = subgroups(g, g.order // 2)[0]
    els = sorted(h.elements)
    win = window(sq, els, els)
    sub = h.as_group()
    near = []
    # near-transversal of the subgroup block: all but one diagonal-ish cell
    from omnilat.engine import find_maximal_of_length

    st_ = find_maximal_of_length(
        LatinSquare(tuple(tuple(r) for r in sub.table)), sub.order - 1
    )
    assert st_.status == "achieved"
    near = [(els[r], els[c], els[s]) for r, c, s in st_.witness]
    w = every_second_witness(sq, win, near, x)
    assert len(w) == expect
    assert is_maximal(sq, w)


def test_every_second_witness_validates_inputs():
    g = group_by_name("Z8")
    sq = cayley(g)
    h = subgroups(g, 4)[0]
    els = sorted(h.elements)
    win = window(sq, els, els)
    with pytest.raises(ValueError):
        every_second_witness(sq, win, [], 0)
    with pytest.raises(ValueError):
        every_second_witness(sq, win, [], 2)  # x > n/8
    with pytest.raises(ValueError):
        every_second_witness(sq, window(sq, [0, 1], [0, 1]), [], 1)


def test_three_fifths_witness_smallest_case():
    g = cyclic(5)
    triv = subgroups(g, 1)[0]
    assert three_fifths_witness(g, triv) == ((2, 3, 0), (3, 4, 2), (4, 2, 1))


def test_three_fifths_witness_order_15():
    g = cyclic(15)
    h = subgroups(g, 3)[0]
    w = three_fifths_witness(g, h)
    assert len(w) == 9
    assert is_maximal(cayley(g), w)


def test_three_fifths_witness_rejects_bad_kernel():
    g = cyclic(10)
    h = subgroups(g, 2)[0]  # Z2 block has no transversal
    with pytest.raises(ValueError):
        three_fifths_witness(g, h)


def test_three_fifths_witness_rejects_wrong_index():
    g = cyclic(15)
    h = subgroups(g, 5)[0]  # index 3, not 5
    with pytest.raises(ValueError):
        three_fifths_witness(g, h)


def test_exceptional_squares_names_and_spectra():
    assert set(EXCEPTIONAL_NAMES) == {"mu8_example", "two_lengths_example"}
    with pytest.raises(ValueError):
        exceptional_order8("unknown")
    rep = spectrum(exceptional_order8("mu8_example"))
    assert rep.achieved == [4, 5, 6, 7] and rep.missing == [8]
    rep = spectrum(exceptional_order8("two_lengths_example"))
    assert rep.achieved == [6, 7] and rep.missing == [4, 5, 8]


@given(
    st.integers(1, 2),
    st.integers(0, 1),
    st.randoms(use_true_random=False),
)
def test_random_admissible_lengths_verify_against_reference(m, q, rnd):
    sq = build_l_star(m, q)
    lo, hi = length_range(sq.n)
    ell = rnd.randrange(lo, hi + 1)
    w = l_star_witness(m, q, ell)
    assert is_maximal_ref([list(r) for r in sq.grid], list(w))
