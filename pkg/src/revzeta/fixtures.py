"""Named example systems shared by the CLI, tests and scripts."""
from __future__ import annotations

import itertools

from .exact_algebra import IntMatrix
from .sft_reversal import BlockSFT, LocalReversalRule, ReversalSFT, validate
from .sofic_reversal import (
    even_shift,
    full_shift_presentation,
    golden_mean_presentation,
)

EXAMPLE_6_A = (
    (0, 1, 0, 0, 0, 1, 1),
    (0, 0, 0, 0, 0, 0, 1),
    (0, 1, 0, 1, 0, 0, 1),
    (0, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 0, 1, 1),
    (0, 0, 0, 0, 0, 0, 1),
    (1, 1, 1, 1, 1, 1, 1),
)
# symbols 1..6 form a 6-cycle under tau, 7 is fixed
EXAMPLE_6_J = (
    (0, 1, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 0, 1, 0),
    (1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 1),
)


def paper_example_6() -> ReversalSFT:
    """Seven-symbol system of order 6 with a 6-cycle and a fixed symbol."""
    return validate(IntMatrix.of(EXAMPLE_6_A), IntMatrix.of(EXAMPLE_6_J), 3, [str(i) for i in range(1, 8)])


def golden_mean() -> ReversalSFT:
    """Golden mean shift with the plain flip ``x_i -> x_{-i}``."""
    return validate([[1, 1], [1, 0]], [[1, 0], [0, 1]], 1, ["0", "1"])


def full_shift(n: int, tau=None, r: int = 1) -> ReversalSFT:
    tau = list(range(n)) if tau is None else list(tau)
    return validate([[1] * n for _ in range(n)], IntMatrix.permutation(tau), r, [str(i) for i in range(n)])


def four_cycle_system() -> ReversalSFT:
    """Four symbols, ``tau = (0 1 2 3)``, order 4, forbidding steps ``a -> a+2``."""
    A = [[0 if (b - a) % 4 == 2 else 1 for b in range(4)] for a in range(4)]
    return validate(A, IntMatrix.permutation([1, 2, 3, 0]), 2, ["a", "b", "c", "d"])


SFT_FIXTURES = {
    "paper-example-6": paper_example_6,
    "golden-mean": golden_mean,
    "full-2-shift": lambda: full_shift(2),
    "full-2-shift-swap": lambda: full_shift(2, [1, 0]),
    "full-3-shift-order-6": lambda: full_shift(3, [1, 2, 0], 3),
    "four-cycle-order-4": four_cycle_system,
}

SOFIC_FIXTURES = {
    "even-shift": lambda: even_shift(),
    "even-shift-order-4": lambda: even_shift((0, 1), 2),
    "golden-mean-presentation": lambda: golden_mean_presentation(),
    "full-2-shift-swap-presentation": lambda: full_shift_presentation(2, (1, 0)),
}


def builtin(name: str):
    if name in SFT_FIXTURES:
        return SFT_FIXTURES[name]()
    if name in SOFIC_FIXTURES:
        return SOFIC_FIXTURES[name]()
    raise KeyError(f"unknown built-in system {name!r}; known: {', '.join(builtin_names())}")


def builtin_names() -> list[str]:
    return sorted(SFT_FIXTURES) + sorted(SOFIC_FIXTURES)


# --------------------------------------------------------------------------
# sliding-block reversals for the recoding checks


def _marker_rule() -> LocalReversalRule:
    """Full 3-shift: reverse, then swap 0/1 at sites flanked by 2 on both sides."""
    table = {}
    for w in itertools.product(range(3), repeat=3):
        left, mid, right = w
        table[w] = 1 - mid if (left == 2 and right == 2 and mid < 2) else mid
    return LocalReversalRule(3, table, 1)


def recoding_fixtures() -> list[tuple[str, BlockSFT, LocalReversalRule]]:
    golden = BlockSFT.from_matrix("01", [[1, 1], [1, 0]])
    full2 = BlockSFT("01", 1, frozenset({(0,), (1,)}))
    full3 = BlockSFT("012", 1, frozenset({(0,), (1,), (2,)}))
    no111 = BlockSFT(
        "01", 3, frozenset(w for w in itertools.product(range(2), repeat=3) if w != (1, 1, 1))
    )
    four = four_cycle_system()
    four_x = BlockSFT.from_matrix(four.alphabet, four.A)
    swap = [1, 0]
    return [
        ("golden-mean flip", golden, LocalReversalRule.one_block([0, 1], 1)),
        ("golden-mean flip offset 1", golden, LocalReversalRule.one_block([0, 1], 1, 1)),
        ("golden-mean flip offset -2", golden, LocalReversalRule.one_block([0, 1], 1, -2)),
        ("full 2-shift swap", full2, LocalReversalRule.one_block(swap, 1)),
        ("full 2-shift swap offset 1", full2, LocalReversalRule.one_block(swap, 1, 1)),
        ("full 3-shift marker flip", full3, _marker_rule()),
        ("no-111 flip", no111, LocalReversalRule.one_block([0, 1], 1)),
        ("no-111 flip offset 1", no111, LocalReversalRule.one_block([0, 1], 1, 1)),
        ("four-cycle order 4", four_x, LocalReversalRule.one_block(four.tau, 2)),
        ("four-cycle order 4 offset 1", four_x, LocalReversalRule.one_block(four.tau, 2, 1)),
    ]
