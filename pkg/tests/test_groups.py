import itertools

import pytest

from oracles import has_transversal_ref
from omnilat.groups import (
    CLASS_COUNTS,
    MAX_CATALOG_ORDER,
    GroupError,
    alternating,
    catalog,
    center,
    conjugacy_class_count,
    cyclic,
    derived_subgroup,
    dicyclic,
    dihedral,
    direct_product,
    element_orders,
    group_by_name,
    index2_subgroup_with_transversal,
    invariant_vector,
    make_group,
    read_group_file,
    subgroups,
    sylow2_cyclic,
    write_group_file,
)


def test_make_group_rejects_broken_tables():
    with pytest.raises(GroupError):
        make_group([[0, 1], [1, 1]], "bad")
    with pytest.raises(GroupError):
        make_group([[1, 0], [0, 1]], "no-identity")
    # latin and has identity, but fails associativity: order-5 loop
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError):
        make_group(loop, "loop")


@pytest.mark.parametrize("order", range(1, MAX_CATALOG_ORDER + 1))
def test_catalog_counts_match_isomorphism_class_counts(order):
    assert len(catalog(order)) == CLASS_COUNTS[order - 1]


def test_catalog_entries_are_pairwise_nonisomorphic():
    for order in range(1, MAX_CATALOG_ORDER + 1):
        vectors = [invariant_vector(g) for g in catalog(order)]
        assert len(set(vectors)) == len(vectors), f"order {order}"


def test_group_axioms_hold_for_catalog():
    for order in (1, 2, 3, 4, 6, 8, 12, 16):
        for g in catalog(order):
            n = g.order
            assert all(g.mul(0, a) == a and g.mul(a, 0) == a for a in range(n))
            assert all(g.mul(a, g.inv(a)) == 0 for a in range(n))


def test_element_orders_divide_group_order():
    for g in catalog(12):
        assert all(g.order % k == 0 for k in element_orders(g))


def test_center_and_derived_subgroup_examples():
    d8 = group_by_name("D8")
    assert len(center(d8)) == 2
    assert len(derived_subgroup(d8)) == 2
    q8 = group_by_name("Q8")
    assert len(center(q8)) == 2
    a4 = alternating(4)
    assert len(center(a4)) == 1
    assert len(derived_subgroup(a4)) == 4
    z6 = cyclic(6)
    assert len(center(z6)) == 6 and len(derived_subgroup(z6)) == 1


def test_conjugacy_class_counts():
    assert conjugacy_class_count(group_by_name("D8")) == 5
    assert conjugacy_class_count(group_by_name("Q8")) == 5
    assert conjugacy_class_count(alternating(4)) == 4
    assert conjugacy_class_count(cyclic(7)) == 7


def test_dihedral_and_dicyclic_shapes():
    d10 = dihedral(10)
    assert d10.order == 10 and not d10.is_abelian
    assert sorted(element_orders(d10)).count(2) == 5
    dic3 = dicyclic(12)
    assert dic3.order == 12
    assert sorted(element_orders(dic3)).count(2) == 1  # unique involution
    with pytest.raises(GroupError):
        dihedral(7)


def test_subgroups_enumeration_orders():
    z12 = cyclic(12)
    assert [h.order for h in subgroups(z12)] == [1, 2, 3, 4, 6, 12]
    d8 = group_by_name("D8")
    assert len(subgroups(d8, 4)) == 3
    assert all(set(h.elements) <= set(range(8)) for h in subgroups(d8))


def test_subgroup_as_group_relabels_to_identity():
    z12 = cyclic(12)
    h = subgroups(z12, 4)[0]
    std = h.as_group()
    assert std.order == 4
    assert std.mul(0, 1) == 1


def test_sylow2_cyclic_matches_transversal_nonexistence():
    # Hall-Paige at desk scale: no transversal iff Sylow 2-subgroup cyclic != 1
    for order in (1, 2, 3, 4, 5, 6):
        for g in catalog(order):
            predicted_none = sylow2_cyclic(g)
            actual = has_transversal_ref([list(r) for r in g.table])
            assert actual == (not predicted_none), g.name


def test_index2_subgroup_with_transversal_cases():
    # Z6's index-2 subgroup is Z3, odd order, so it carries a transversal
    h = index2_subgroup_with_transversal(cyclic(6))
    assert h is not None and h.elements == (0, 2, 4)
    assert has_transversal_ref([list(r) for r in h.as_group().table])


def test_index2_subgroup_detection_on_even_orders():
    d8 = group_by_name("D8")
    h = index2_subgroup_with_transversal(d8)
    assert h is not None and h.order == 4
    z4 = cyclic(4)
    assert index2_subgroup_with_transversal(z4) is None  # Z2 block lacks one
    k4 = direct_product(cyclic(2), cyclic(2))
    assert index2_subgroup_with_transversal(k4) is None


def test_group_by_name_and_unknown():
    assert group_by_name("SL(2,3)").order == 24
    with pytest.raises(GroupError):
        group_by_name("Monster")


def test_group_file_round_trip(tmp_path):
    g = group_by_name("Q8")
    path = tmp_path / "q8.grp"
    write_group_file(g, path)
    back = read_group_file(path)
    assert back.table == g.table
    assert invariant_vector(back) == invariant_vector(g)


def test_direct_product_order_and_commutativity():
    g = direct_product(cyclic(3), cyclic(5))
    assert g.order == 15 and g.is_abelian
    h = direct_product(group_by_name("D8"), cyclic(2))
    assert h.order == 16 and not h.is_abelian


def test_all_order16_groups_present_and_distinct():
    names = [g.name for g in catalog(16)]
    assert len(names) == 14
    nonabelian = [g.name for g in catalog(16) if not g.is_abelian]
    assert len(nonabelian) == 9


def test_cayley_tables_are_latin():
    for order in (6, 8, 16):
        for g in catalog(order):
            full = set(range(order))
            assert all(set(row) == full for row in g.table)
            assert all({row[c] for row in g.table} == full for c in range(order))


def test_sylow2_cyclic_known_values():
    expect = {
        "Z1": False, "Z2": True, "Z4": True, "Z2xZ2": False, "Z6": True,
        "D6": True, "Z8": True, "D8": False, "Q8": False, "Z12": True,
        "A4": False, "Dic3": True, "Z16": True, "D16": False, "Q16": False,
    }
    for name, val in expect.items():
        assert sylow2_cyclic(group_by_name(name)) is val, name


def test_generators_recorded_for_catalog_groups():
    for g in catalog(8):
        if g.generators:
            produced = set()
            frontier = {0}
            gens = [idx for _, idx in g.generators]
            while frontier:
                produced |= frontier
                frontier = {
                    g.mul(a, b) for a in produced for b in gens
                } - produced
            assert produced == set(range(g.order))


def test_associativity_sampled_for_every_catalog_entry():
    for order in range(1, 13):
        for g in catalog(order):
            for a, b, c in itertools.islice(
                itertools.product(range(order), repeat=3), 200
            ):
                assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))
