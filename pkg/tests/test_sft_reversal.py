"""Reversal systems of finite type in matrix form."""
import random

import pytest
from hypothesis import given, strategies as st

from revzeta.exact_algebra import IntMatrix
from revzeta.fixtures import EXAMPLE_6_A, EXAMPLE_6_J, SFT_FIXTURES, full_shift, golden_mean, paper_example_6, recoding_fixtures
from revzeta.sft_reversal import (
    BlockSFT,
    DimensionMismatch,
    LocalReversalRule,
    NotPermutation,
    NotZeroOne,
    OrderViolation,
    ReversalLawViolation,
    RuleError,
    check_rule,
    fixed_count_bruteforce,
    fixed_count_trace,
    flip_counts_bruteforce,
    flip_counts_trace,
    flip_view,
    one_block_recode,
    original_fixed_count,
    random_reversal_sft,
    restrict_fixed_subsystem,
    validate,
)

seeds = st.integers(0, 2**32 - 1)


def random_system(seed, max_n=6, max_r=3):
    rng = random.Random(seed)
    return random_reversal_sft(rng, rng.randint(1, max_n), rng.randint(1, max_r), rng.choice([0.3, 0.5, 0.7]))


class TestValidate:
    def test_example_is_valid(self):
        sys = validate(EXAMPLE_6_A, EXAMPLE_6_J, 3)
        assert sys.tau == (1, 2, 3, 4, 5, 0, 6)
        assert sys.meta["true_half_order"] == 3

    @pytest.mark.parametrize("r", [1, 2, 5])
    def test_identity_j_needs_symmetric_a(self, r):
        I = IntMatrix.identity(2)
        validate([[1, 1], [1, 0]], I, r)
        with pytest.raises(ReversalLawViolation):
            validate([[1, 1], [0, 0]], I, r)

    def test_repeated_row(self):
        with pytest.raises(NotPermutation, match="not a permutation"):
            validate([[1, 1], [1, 1]], [[1, 0], [1, 0]], 1)

    def test_error_kinds(self):
        with pytest.raises(NotZeroOne) as exc:
            validate([[2]], [[1]], 1)
        assert exc.value.cell == ("A", 0, 0)
        with pytest.raises(DimensionMismatch):
            validate([[1, 0], [0, 1]], [[1]], 1)
        with pytest.raises(OrderViolation):
            # a 3-cycle has no even power equal to the identity below 6
            validate([[1] * 3] * 3, IntMatrix.permutation([1, 2, 0]), 1)
        with pytest.raises(OrderViolation):
            validate([[1]], [[1]], 0)
        with pytest.raises(DimensionMismatch):
            validate([[1]], [[1]], 1, alphabet=["x", "y"])

    def test_reversal_law_cell(self):
        with pytest.raises(ReversalLawViolation) as exc:
            validate([[0, 1], [0, 0]], [[1, 0], [0, 1]], 1)
        assert exc.value.cell is not None

    @given(seeds)
    def test_random_systems_satisfy_identities(self, seed):
        sys = random_system(seed)
        A, J = sys.A, sys.J
        assert A @ J == J @ A.T
        assert J ** (2 * sys.r) == IntMatrix.identity(sys.size)
        for l in range(sys.r):
            J2l = J ** (2 * l)
            assert A @ J2l == J2l @ A


class TestFixedCounts:
    def test_full_two_shift(self):
        sys = full_shift(2)
        assert fixed_count_trace(sys, 3, 0) == 8
        assert fixed_count_bruteforce(sys, 3, 0) == 8

    def test_example_values(self):
        sys = paper_example_6()
        A = IntMatrix.of(EXAMPLE_6_A)
        assert fixed_count_trace(sys, 2, 0) == (A @ A).trace() == 13
        # tr(A^m J^2) equals tr(A^m) for the example matrices
        assert [fixed_count_trace(sys, m, 1) for m in range(1, 6)] == [1, 13, 37, 121, 421]
        assert [fixed_count_bruteforce(sys, m, 1) for m in range(1, 6)] == [1, 13, 37, 121, 421]

    def test_single_self_loop(self):
        sys = validate([[1]], [[1]], 3, ["7"])
        for m in range(1, 5):
            for l in range(3):
                assert fixed_count_bruteforce(sys, m, l) == 1 == fixed_count_trace(sys, m, l)

    def test_range_checks(self):
        sys = golden_mean()
        with pytest.raises(ValueError):
            fixed_count_trace(sys, 0, 0)
        with pytest.raises(ValueError):
            fixed_count_trace(sys, 1, 1)

    @given(seeds)
    def test_trace_equals_bruteforce(self, seed):
        sys = random_system(seed)
        for l in range(sys.r):
            for m in range(1, 6):
                assert fixed_count_trace(sys, m, l) == fixed_count_bruteforce(sys, m, l)

    @pytest.mark.parametrize("name", sorted(SFT_FIXTURES))
    def test_fixtures(self, name):
        sys = SFT_FIXTURES[name]()
        for l in range(sys.r):
            for m in range(1, 5):
                assert fixed_count_trace(sys, m, l) == fixed_count_bruteforce(sys, m, l)


class TestSubsystems:
    def test_example_x2(self):
        sub = restrict_fixed_subsystem(paper_example_6(), 1)
        assert sub.alphabet == ("7",)
        assert sub.A == IntMatrix.of([[1]])

    def test_l_equals_r_is_whole(self):
        sys = paper_example_6()
        sub = restrict_fixed_subsystem(sys, 3)
        assert sub.A == sys.A and sub.alphabet == sys.alphabet

    def test_range(self):
        with pytest.raises(ValueError):
            restrict_fixed_subsystem(paper_example_6(), 0)

    def test_order_twelve(self):
        # cycles of lengths 1, 2, 3, 4 and 6 under tau; r = 6
        tau, start = [], 0
        for length in (1, 2, 3, 4, 6):
            tau += [start + (k + 1) % length for k in range(length)]
            start += length
        n = len(tau)
        sys = validate([[1] * n] * n, IntMatrix.permutation(tau), 6)
        sizes = {l: restrict_fixed_subsystem(sys, l).size for l in (1, 2, 3, 6)}
        assert sizes == {1: 3, 2: 7, 3: 12, 6: 16}
        assert flip_view(sys, 1).system.size == 3
        assert flip_view(sys, 3).system.size == 12

    @given(seeds, st.integers(1, 3))
    def test_subsystem_points_are_fixed(self, seed, l):
        sys = random_system(seed)
        if l > sys.r:
            return
        sub = restrict_fixed_subsystem(sys, l)
        for m in range(1, 5):
            # points of X_2l with period m are points fixed by sigma^m and phi^2l
            expected = len({w for w in _periodic(sys, m) if _fixed_by_phi_power(sys, w, 2 * l)})
            got = 0 if sub.is_empty() else fixed_count_trace(sub, m, 0)
            assert got == expected


def _periodic(sys, m):
    import itertools

    return [
        w
        for w in itertools.product(range(sys.size), repeat=m)
        if all(sys.A[w[i], w[(i + 1) % m]] for i in range(m))
    ]


def _fixed_by_phi_power(sys, w, e):
    # phi^e with e even maps x_i to tau^e(x_i)
    from revzeta.bruteforce import perm_power

    p = perm_power(sys.tau, e)
    return all(p[s] == s for s in w)


class TestFlips:
    def test_example_sub_flip(self):
        fv = flip_view(paper_example_6(), 3)
        assert flip_counts_trace(fv, 1) == (1, 1, 1)
        assert flip_counts_bruteforce(fv, 1) == (1, 1, 1)

    def test_single_fixed_point(self):
        fv = flip_view(validate([[1]], [[1]], 1), 1)
        for m in range(1, 5):
            assert flip_counts_trace(fv, m) == (1, 1, 1)

    def test_golden_mean_identity_flip(self):
        fv = flip_view(golden_mean(), 1)
        assert flip_counts_trace(fv, 1)[0] == 1 == flip_counts_bruteforce(fv, 1)[0]

    def test_even_power_rejected(self):
        with pytest.raises(ValueError):
            flip_view(paper_example_6(), 2)

    @given(seeds)
    def test_flip_trace_equals_bruteforce(self, seed):
        sys = random_system(seed)
        for d in (1, 3):
            if sys.r % d:
                continue
            fv = flip_view(sys, d)
            for m in range(1, 4):
                assert flip_counts_trace(fv, m) == flip_counts_bruteforce(fv, m)


class TestRecoding:
    def test_one_block_matches_direct_form(self):
        X = BlockSFT.from_matrix("01", [[1, 1], [1, 0]])
        sys = one_block_recode(X, LocalReversalRule.one_block([0, 1], 1))
        assert sys.A == golden_mean().A and sys.tau == golden_mean().tau

    def test_golden_mean_with_offset(self):
        X = BlockSFT.from_matrix("01", [[1, 1], [1, 0]])
        sys = one_block_recode(X, LocalReversalRule.one_block([0, 1], 1, 1))
        lucas = [1, 3, 4, 7, 11, 18]
        assert [fixed_count_trace(sys, m, 0) for m in range(1, 7)] == lucas

    def test_bad_rules(self):
        golden = BlockSFT.from_matrix("01", [[1, 1], [1, 0]])
        with pytest.raises(RuleError):
            # swapping 0 and 1 maps 11 into the golden mean shift
            check_rule(golden, LocalReversalRule.one_block([1, 0], 1))
        full3 = BlockSFT("012", 1, frozenset({(0,), (1,), (2,)}))
        with pytest.raises(RuleError):
            # a 3-cycle on symbols has no order dividing 2
            check_rule(full3, LocalReversalRule.one_block([1, 2, 0], 1))

    @pytest.mark.parametrize("name", [n for n, _, _ in recoding_fixtures()][:8])
    def test_recoded_counts(self, name):
        _, X, rule = next(f for f in recoding_fixtures() if f[0] == name)
        sys = one_block_recode(X, rule)
        for l in range(rule.r):
            for m in range(1, 5):
                assert fixed_count_trace(sys, m, l) == original_fixed_count(X, rule, m, l)
