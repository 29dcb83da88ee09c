"""Sofic reversal systems: futures, pasts, the joint state chain and signed counts."""
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from revzeta.bruteforce import BudgetExceeded
from revzeta.exact_algebra import IntMatrix
from revzeta.fixtures import SOFIC_FIXTURES, full_shift, golden_mean, paper_example_6
from revzeta.sft_reversal import fixed_count_trace, flip_counts_trace, flip_view, random_reversal_sft
from revzeta.sofic_reversal import (
    ClosureViolation,
    EmptyShift,
    LabeledPresentation,
    build_joint_state_chain,
    build_signed_matrices,
    check_properties,
    check_tau_closed,
    compute_futures,
    compute_futures_by_words,
    compute_pasts,
    even_shift,
    find_graph_diamond,
    fixed_count_theoremC,
    flip_counts_sofic,
    full_shift_presentation,
    golden_mean_presentation,
    presentation_from_sft,
    random_closed_presentation,
    signed_matrix_family,
    sofic_fixed_count_bruteforce,
    sofic_flip_counts_bruteforce,
    trim_essential,
)


def random_presentation(seed):
    rng = random.Random(seed)
    return random_closed_presentation(rng, rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3), density=0.2)


class TestPresentations:
    def test_acyclic_chain_is_empty(self):
        p = LabeledPresentation.build([("x", "y", "a"), ("y", "z", "a")], {"a": "a"}, 1)
        with pytest.raises(EmptyShift):
            trim_essential(p)

    def test_self_loop_unchanged(self):
        p = full_shift_presentation(1)
        assert trim_essential(p) == p

    def test_dangling_sink_removed(self):
        p = LabeledPresentation.build([("x", "x", "a"), ("x", "y", "a")], {"a": "a"}, 1)
        t = trim_essential(p)
        assert t.states == ("x",) and len(t.edges) == 1

    def test_tau_closure(self):
        check_tau_closed(even_shift())
        with pytest.raises(ClosureViolation):
            # the reversal swaps 0 and 1 and would need the word 00 forbidden
            check_tau_closed(golden_mean_presentation(tau=(1, 0)))

    def test_tau_must_be_bijective(self):
        with pytest.raises(ValueError):
            LabeledPresentation.build([("x", "x", "a"), ("x", "x", "b")], {"a": "a", "b": "a"}, 1)


class TestFuturesAndPasts:
    def test_full_shift_single_future(self):
        assert len(compute_futures(full_shift_presentation(2))) == 1

    def test_golden_mean(self):
        assert len(compute_futures(golden_mean_presentation())) == 2

    def test_even_shift_has_three(self):
        # the ray 1^-inf leaves both states possible, a third future
        p = even_shift()
        assert len(compute_futures(p)) == 3
        assert len(compute_pasts(p)) == 3

    @pytest.mark.parametrize("name", sorted(SOFIC_FIXTURES))
    def test_semigroup_and_word_methods_agree(self, name):
        p = SOFIC_FIXTURES[name]()
        assert set(compute_futures(p)) == set(compute_futures_by_words(p, 6))

    @settings(max_examples=25)
    @given(st.integers(0, 10**6))
    def test_random_semigroup_vs_words(self, seed):
        p = random_presentation(seed)
        assume(p is not None)
        assert set(compute_futures(p)) == set(compute_futures_by_words(p, 4))


class TestJointStateChain:
    def test_full_shift_swap(self):
        chain = build_joint_state_chain(full_shift_presentation(2, (1, 0)))
        assert chain.system.size == 2
        assert chain.system.A == IntMatrix.of([[1, 1], [1, 1]])

    @pytest.mark.parametrize("name", sorted(SOFIC_FIXTURES))
    def test_fixture_certificates(self, name):
        chain = build_joint_state_chain(SOFIC_FIXTURES[name]())
        assert all(chain.certificate[k]["pass"] for k in ("P1", "P2", "P3"))
        cert = check_properties(chain.system.A, chain.system.J, chain.labeling, chain.tau, chain.r)
        assert cert["pass"]

    def test_even_shift_size(self):
        assert len(build_joint_state_chain(even_shift()).states) == 13

    def test_identity_labelling_has_no_diamond(self):
        A = golden_mean().A
        assert find_graph_diamond(A, [0, 1]) is None

    def test_minimal_diamond(self):
        # 0 -> 1 -> 3 and 0 -> 2 -> 3 read the same labels, and 3 -> 0 closes a cycle
        A = IntMatrix.of([[0, 1, 1, 0], [0, 0, 0, 1], [0, 0, 0, 1], [1, 0, 0, 0]])
        assert find_graph_diamond(A, [0, 1, 1, 2]) is not None
        cert = check_properties(A, IntMatrix.identity(4), [0, 1, 1, 2], [0, 1, 2], 1)
        assert not cert["P3"]["pass"] and not cert["pass"]

    def test_injective_labelling_matches_matrix_counts(self):
        sys = paper_example_6()
        chain = build_joint_state_chain(trim_essential(presentation_from_sft(sys)))
        for l in range(3):
            for m in range(1, 6):
                assert fixed_count_theoremC(chain, m, l) == fixed_count_trace(sys, m, l)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_random_sft_through_chain(self, seed):
        rng = random.Random(seed)
        sys = random_reversal_sft(rng, rng.randint(1, 5), rng.randint(1, 3))
        try:
            p = trim_essential(presentation_from_sft(sys))
        except EmptyShift:
            return
        chain = build_joint_state_chain(p)
        for l in range(sys.r):
            for m in range(1, 6):
                assert fixed_count_theoremC(chain, m, l) == fixed_count_trace(sys, m, l)


class TestSignedMatrices:
    def test_k1_is_chain_matrix(self):
        chain = build_joint_state_chain(even_shift())
        s1 = build_signed_matrices(chain, 1, essential_only=False)
        assert s1.A_k == chain.system.A
        assert s1.J_k == chain.system.J

    def test_k_beyond_label_classes(self):
        chain = build_joint_state_chain(full_shift_presentation(2, (1, 0)))
        s = build_signed_matrices(chain, 2, essential_only=False)
        assert s.A_k.n == 0

    def test_even_shift_k2_identity(self):
        chain = build_joint_state_chain(even_shift())
        s2 = build_signed_matrices(chain, 2)
        assert s2.A_k @ s2.J_k == s2.J_k @ s2.A_k.T

    def test_essential_index_set_keeps_counts(self):
        chain = build_joint_state_chain(SOFIC_FIXTURES["even-shift-order-4"]())
        for k in (1, 2, 3):
            full = build_signed_matrices(chain, k, essential_only=False)
            ess = build_signed_matrices(chain, k)
            for m in range(1, 6):
                for e in (0, 2):
                    assert full.trace_with_j(m, e) == ess.trace_with_j(m, e)

    def test_trace_with_j(self):
        chain = build_joint_state_chain(SOFIC_FIXTURES["even-shift-order-4"]())
        for s in signed_matrix_family(chain):
            for m in range(1, 5):
                for e in range(4):
                    assert s.trace_with_j(m, e) == (s.power(m) @ s.J_k**e).trace()

    @settings(max_examples=40)
    @given(st.integers(0, 10**6))
    def test_random_identities(self, seed):
        p = random_presentation(seed)
        assume(p is not None)
        try:
            chain = build_joint_state_chain(p)
            fam = signed_matrix_family(chain)
        except BudgetExceeded:
            assume(False)
        for s in fam:
            n = s.A_k.n
            assert s.A_k @ s.J_k == s.J_k @ s.A_k.T
            assert s.J_k ** (2 * p.r) == IntMatrix.identity(n)


class TestCounts:
    def test_even_shift(self):
        chain = build_joint_state_chain(even_shift())
        counts = [fixed_count_theoremC(chain, m, 0) for m in range(1, 7)]
        assert counts == [2, 2, 5, 6, 12, 17]
        assert counts == [sofic_fixed_count_bruteforce(even_shift(), m, 0) for m in range(1, 7)]

    def test_full_shift_bruteforce(self):
        assert sofic_fixed_count_bruteforce(full_shift_presentation(2), 3, 0) == 8

    def test_even_shift_flip(self):
        p = even_shift()
        chain = build_joint_state_chain(p)
        for m in range(1, 5):
            assert flip_counts_sofic(chain, m) == sofic_flip_counts_bruteforce(p, m)

    def test_single_loop_flip(self):
        chain = build_joint_state_chain(full_shift_presentation(1))
        for m in range(1, 4):
            assert flip_counts_sofic(chain, m) == (1, 1, 1)

    def test_injective_flip_counts(self):
        sys = full_shift(2, (1, 0))
        chain = build_joint_state_chain(presentation_from_sft(sys))
        for m in range(1, 4):
            assert flip_counts_sofic(chain, m) == flip_counts_trace(flip_view(sys, 1), m)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_random_theoremC_equals_bruteforce(self, seed):
        p = random_presentation(seed)
        assume(p is not None)
        try:
            chain = build_joint_state_chain(p)
            signed_matrix_family(chain)
        except BudgetExceeded:
            assume(False)
        for l in range(p.r):
            for m in range(1, 6):
                assert fixed_count_theoremC(chain, m, l) == sofic_fixed_count_bruteforce(p, m, l)
