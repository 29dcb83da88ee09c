"""The group of order-2r reversals and its finite-index subgroups."""
import pytest
from hypothesis import given, strategies as st

from revzeta.group_g2r import (
    GroupElement,
    OrderMismatch,
    SubgroupDescriptor,
    coset_enumeration_index,
    enumerate_subgroups,
    g_mul,
    order_of_b_power,
    standard_coset_table,
    subgroup_fixed_spec,
)


def elements(r):
    return st.builds(GroupElement, st.integers(-6, 6), st.integers(0, 2 * r - 1), st.just(r))


orders = st.integers(1, 4)


def a(r, n=1):
    return GroupElement.a(r, n)


def b(r, k=1):
    return GroupElement.b(r, k)


class TestElements:
    def test_defining_relation_examples(self):
        r = 2
        ab = a(r) * b(r)
        assert ab * ab == b(r, 2)
        assert a(r, 2) * a(r, 3) == a(r, 5)
        assert b(r) * a(r) == a(r, -1) * b(r)
        assert a(r) * b(r) == b(r) * a(r).inverse()

    def test_b_order(self):
        assert order_of_b_power(2, 3) == 3
        assert order_of_b_power(3, 3) == 2
        for r in range(1, 6):
            assert order_of_b_power(0, r) == 1
            assert b(r) ** (2 * r) == GroupElement.identity(r)

    def test_mixed_orders_rejected(self):
        with pytest.raises(OrderMismatch):
            g_mul(a(1), a(2))

    @given(orders.flatmap(lambda r: st.tuples(elements(r), elements(r), elements(r))))
    def test_associative(self, xyz):
        x, y, z = xyz
        assert (x * y) * z == x * (y * z)

    @given(orders.flatmap(elements))
    def test_inverse(self, x):
        assert (x * x.inverse()).is_identity()
        assert (x.inverse() * x).is_identity()

    @given(orders.flatmap(elements), st.integers(-4, 4), st.integers(-4, 4))
    def test_power_law(self, x, i, j):
        assert x**i * x**j == x ** (i + j)

    @given(orders.flatmap(elements))
    def test_odd_b_part_is_involution_on_a(self, x):
        # conjugating a by x inverts it exactly when x reverses
        conj = x * a(x.order_r) * x.inverse()
        assert conj == a(x.order_r, -1 if x.exp_b % 2 else 1)


class TestSubgroups:
    def test_r1_small(self):
        subs = enumerate_subgroups(1, 2)
        assert sorted(str(d) for d, _ in subs) == sorted(
            ["F2(m=1,j=0,k=1)@r=1", "F1(m=1,l=0,k=1)@r=1", "F2(m=2,j=0,k=1)@r=1", "F2(m=2,j=1,k=1)@r=1"]
        )
        assert sorted(i for _, i in subs) == [1, 2, 2, 2]

    def test_index_six_count(self):
        assert sum(1 for _, i in enumerate_subgroups(3, 6) if i == 6) == 12

    def test_empty(self):
        assert enumerate_subgroups(3, 0) == []

    @pytest.mark.parametrize(
        "gens, r, expected",
        [
            (lambda r: [a(r), b(r)], 3, 1),
            (lambda r: [a(r, 2), b(r, 2)], 3, 4),
            (lambda r: [a(r, 2), a(r) * b(r)], 1, 2),
        ],
    )
    def test_coset_examples(self, gens, r, expected):
        assert coset_enumeration_index(gens(r), r, 200) == expected

    def test_coset_bound(self):
        assert coset_enumeration_index([a(2, 5)], 2, 10) == "exceeded"
        with pytest.raises(ValueError):
            coset_enumeration_index([a(2)], 2, 0)

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_closed_form_index_matches_coset_enumeration(self, r):
        for d, idx in enumerate_subgroups(r, 8):
            assert coset_enumeration_index(d.generators(), r, 8 * idx + 16) == idx, str(d)

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_descriptors_are_distinct_subgroups(self, r):
        tables = {}
        for d, idx in enumerate_subgroups(r, 8):
            t = standard_coset_table(d.generators(), r)
            assert t not in tables, f"{d} equals {tables.get(t)}"
            tables[t] = d

    def test_all_subgroups_up_to_index_found(self):
        # every subgroup generated by two normal-form elements of small
        # exponent with index at most 6 appears among the descriptors
        r, bound = 2, 6
        known = {standard_coset_table(d.generators(), r) for d, _ in enumerate_subgroups(r, bound)}
        elems = [GroupElement(n, k, r) for n in range(-3, 4) for k in range(2 * r)]
        for x in elems:
            for y in elems:
                idx = coset_enumeration_index([x, y], r, 60)
                if idx != "exceeded" and idx <= bound:
                    assert standard_coset_table([x, y], r) in known, (str(x), str(y))

    @given(st.sampled_from(enumerate_subgroups(3, 12)))
    def test_descriptor_text_roundtrip(self, item):
        d, _ = item
        assert SubgroupDescriptor.parse(str(d)) == d

    def test_invalid_descriptors(self):
        with pytest.raises(ValueError):
            SubgroupDescriptor("F1", m=1, k=2, l=0, r=3)
        with pytest.raises(ValueError):
            SubgroupDescriptor("F2", m=2, k=2, j=2, r=3)
        with pytest.raises(ValueError):
            SubgroupDescriptor.parse("F3(m=1)@r=1")


class TestFixedSpecs:
    def test_whole_group(self):
        spec = subgroup_fixed_spec(SubgroupDescriptor("F2", m=1, j=0, k=1, r=1))
        assert spec.conditions == ((1, 0), (0, 1))

    def test_pure_translation(self):
        spec = subgroup_fixed_spec(SubgroupDescriptor("F1", m=4, l=0, k=3, r=3))
        assert spec.conditions == ((4, 0),)
        assert spec.period == 4

    def test_period_accounts_for_b_order(self):
        spec = subgroup_fixed_spec(SubgroupDescriptor("F1", m=2, l=1, k=3, r=3))
        # (a^2 b^2)^3 = a^6
        assert spec.period == 6
        assert (GroupElement(2, 2, 3) ** 3) == a(3, 6)
