"""Shift-reversal systems of finite type in matrix form.

A system is a pair of zero-one matrices ``(A, J)`` over a finite alphabet
with ``AJ = JA^T`` and ``J^2r = I``. The reversal acts on the vertex shift
``X_A`` by ``phi(x)_i = tau(x_{-i})`` where ``tau`` is the permutation
encoded by ``J``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .bruteforce import (
    MatrixWalker,
    BudgetExceeded,
    count_fixed_configurations,
    default_budget,
    perm_order,
    perm_power,
)
from .exact_algebra import IntMatrix, diag, entry_sum, mat_pow_trace
from .group_g2r import order_of_b_power


class ValidationError(ValueError):
    """Base class for rejected systems; ``cell`` names the first bad entry."""

    code = "invalid"

    def __init__(self, message: str, cell: tuple | None = None):
        super().__init__(message)
        self.cell = cell


class NotZeroOne(ValidationError):
    code = "not-zero-one"


class NotPermutation(ValidationError):
    code = "not-a-permutation"


class OrderViolation(ValidationError):
    code = "J^2r != I"


class ReversalLawViolation(ValidationError):
    code = "AJ != JA^T"


class CommutationFailure(ValidationError):
    code = "A^m J^2l != J^2l A^m"


class DimensionMismatch(ValidationError):
    code = "dimension"


@dataclass(frozen=True)
class ReversalSFT:
    """Validated ``(A, J)`` pair. Build with :func:`validate`."""

    alphabet: tuple[str, ...]
    A: IntMatrix
    J: IntMatrix
    r: int
    tau: tuple[int, ...]
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def is_empty(self) -> bool:
        return not self.alphabet

    def with_order(self, r: int) -> ReversalSFT:
        """Same matrices viewed as a system of order ``2r`` (needs ``J^2r = I``)."""
        if perm_power(self.tau, 2 * r) != tuple(range(self.size)):
            raise OrderViolation(f"J^{2 * r} != I for this system")
        return replace(self, r=r)

    def to_document(self) -> dict:
        return {
            "kind": "sft",
            "order": 2 * self.r,
            "alphabet": list(self.alphabet),
            "A": self.A.to_lists(),
            "J": self.J.to_lists(),
        }


def empty_system(r: int = 1) -> ReversalSFT:
    return ReversalSFT((), IntMatrix(()), IntMatrix(()), r, ())


def validate(A, J, r: int, alphabet: Sequence[str] | None = None) -> ReversalSFT:
    """Check the defining identities of a reversal pair and extract ``tau``.

    Raises a :class:`ValidationError` subclass naming the first bad cell.
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix.of(A)
    J = J if isinstance(J, IntMatrix) else IntMatrix.of(J)
    if r < 1:
        raise OrderViolation("order 2r needs r >= 1")
    if not A.is_square() or not J.is_square() or A.shape != J.shape:
        raise DimensionMismatch(f"A{A.shape} and J{J.shape} must be square of equal size")
    n = A.n
    if alphabet is None:
        alphabet = tuple(str(i + 1) for i in range(n))
    alphabet = tuple(str(a) for a in alphabet)
    if len(alphabet) != n:
        raise DimensionMismatch(f"alphabet has {len(alphabet)} symbols, matrices are {n}x{n}")
    if len(set(alphabet)) != n:
        raise DimensionMismatch("alphabet symbols must be distinct")
    for name, M in (("A", A), ("J", J)):
        for i, j in itertools.product(range(n), repeat=2):
            if M[i, j] not in (0, 1):
                raise NotZeroOne(f"{name}[{i},{j}] = {M[i, j]} is not 0 or 1", (name, i, j))
    tau = []
    for i in range(n):
        ones = [j for j in range(n) if J[i, j]]
        if len(ones) != 1:
            raise NotPermutation(f"J is not a permutation: row {i} has {len(ones)} ones", ("J", i))
        tau.append(ones[0])
    if len(set(tau)) != n:
        seen = {}
        for i, t in enumerate(tau):
            if t in seen:
                raise NotPermutation(
                    f"J is not a permutation: rows {seen[t]} and {i} repeat column {t}", ("J", i, t)
                )
            seen[t] = i
    tau = tuple(tau)
    J2r = J ** (2 * r)
    ident = IntMatrix.identity(n)
    if J2r != ident:
        bad = next((i, j) for i in range(n) for j in range(n) if J2r[i, j] != ident[i, j])
        raise OrderViolation(f"J^{2 * r} differs from I at {bad}", ("J^2r",) + bad)
    left, right = A @ J, J @ A.T
    if left != right:
        bad = next((i, j) for i in range(n) for j in range(n) if left[i, j] != right[i, j])
        raise ReversalLawViolation(f"AJ != JA^T at {bad}", ("AJ",) + bad)
    sys = ReversalSFT(alphabet, A, J, r, tau, {"true_half_order": true_half_order(tau)})
    check_eq42(sys)
    # A commuting with J^2l gives A^m J^2l = J^2l A^m for every m
    for l in range(1, r):
        pi = perm_power(tau, 2 * l)
        for i, k in itertools.product(range(n), repeat=2):
            if A[i, k] != A[pi[i], pi[k]]:
                raise CommutationFailure(f"A J^{2 * l} != J^{2 * l} A at {(i, k)}", (l, i, k))
    return sys


def check_eq42(sys: ReversalSFT) -> None:
    """``A(a, b) = A(tau(b), tau(a))`` cell by cell."""
    A, tau = sys.A, sys.tau
    for a, b in itertools.product(range(sys.size), repeat=2):
        if A[a, b] != A[tau[b], tau[a]]:
            raise ReversalLawViolation(
                f"A({a},{b}) != A(tau({b}), tau({a}))", ("A", a, b)
            )


def true_half_order(tau: Sequence[int]) -> int:
    """Smallest ``r`` with ``tau^2r = id``."""
    o = perm_order(tau) if tau else 1
    return o if o % 2 else o // 2


def _from_perm_restriction(sys: ReversalSFT, keep: list[int], tau_map: Sequence[int], r: int, meta) -> ReversalSFT:
    pos = {s: i for i, s in enumerate(keep)}
    sub_tau = tuple(pos[tau_map[s]] for s in keep)
    return ReversalSFT(
        tuple(sys.alphabet[s] for s in keep),
        sys.A.restrict(keep),
        IntMatrix.permutation(sub_tau),
        r,
        sub_tau,
        meta,
    )


def restrict_fixed_subsystem(sys: ReversalSFT, l: int) -> ReversalSFT:
    """The subsystem ``X_2l`` of points fixed by ``phi^2l``.

    The recorded order is recomputed from the restricted ``tau``.
    """
    if not 1 <= l <= sys.r:
        raise ValueError(f"l must lie in 1..{sys.r}")
    t2l = perm_power(sys.tau, 2 * l)
    keep = [s for s in range(sys.size) if t2l[s] == s]
    if not keep:
        return empty_system(1)
    sub = _from_perm_restriction(sys, keep, sys.tau, 1, {"fixed_by": f"phi^{2 * l}"})
    r_true = true_half_order(sub.tau)
    return replace(sub, r=r_true, meta={**sub.meta, "true_half_order": r_true})


def fixed_count_trace(sys: ReversalSFT, m: int, l: int) -> int:
    """``tr(A^m J^2l)``, the number of points fixed by ``sigma^m phi^2l``."""
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 <= l < sys.r:
        raise ValueError(f"l must lie in 0..{sys.r - 1}")
    if sys.is_empty():
        return 0
    return mat_pow_trace(sys.A, sys.J, m, 2 * l)


def count_points_fixed_by(
    sys: ReversalSFT, conditions: Sequence[tuple[int, int]], period: int, budget: int | None = None
) -> int:
    """Brute-force count of points of ``X_A`` with period dividing ``period``
    that satisfy every ``(n, e)`` condition ``sigma^n phi^e x = x``."""
    if sys.is_empty():
        return 0
    return count_fixed_configurations(
        sys.size, period, conditions, sys.tau, MatrixWalker(sys.A.rows), budget
    )


def fixed_count_bruteforce(sys: ReversalSFT, m: int, l: int, budget: int | None = None) -> int:
    """Enumerate windows ``x_0..x_{m-1}`` and extend by ``x_{m+i} = tau^-2l(x_i)``."""
    if m < 1:
        raise ValueError("m must be positive")
    period = m * order_of_b_power(2 * l, sys.r)
    return count_points_fixed_by(sys, [(m, 2 * l)], period, budget)


# --------------------------------------------------------------------------
# flips


@dataclass(frozen=True)
class FlipView:
    """The sub-flip ``(X_2d, sigma, phi^d)`` for odd ``d`` as an order-2 system."""

    system: ReversalSFT
    power: int

    @property
    def flip_symbol_map(self) -> tuple[int, ...]:
        return self.system.tau


def flip_view(sys: ReversalSFT, d: int) -> FlipView:
    if d % 2 == 0 or d < 1:
        raise ValueError("flip power must be odd and positive")
    t2d = perm_power(sys.tau, 2 * d)
    keep = [s for s in range(sys.size) if t2d[s] == s]
    if not keep:
        return FlipView(empty_system(1), d)
    flip = perm_power(sys.tau, d)
    sub = _from_perm_restriction(sys, keep, flip, 1, {"flip_of": f"phi^{d}"})
    if any(flip[flip[s]] != s for s in keep):
        raise NotPermutation("flip symbol map is not an involution on the restricted alphabet")
    return FlipView(sub, d)


def flip_counts_trace(fv: FlipView, m: int) -> tuple[int, int, int]:
    """``(p(2m-1, 0), p(2m, 0), p(2m, 1))`` from the entry-sum formulas."""
    if m < 1:
        raise ValueError("m must be positive")
    s = fv.system
    if s.is_empty():
        return (0, 0, 0)
    return flip_counts_from_matrices(s.A, s.J, m)


def flip_counts_from_matrices(A: IntMatrix, J: IntMatrix, m: int) -> tuple[int, int, int]:
    Jd = diag(J)
    AJd = diag(A @ J)
    JAd = diag(J @ A)
    Am1 = A ** (m - 1)
    odd = entry_sum(Jd @ Am1 @ AJd)
    even0 = entry_sum(Jd @ (Am1 @ A) @ Jd)
    even1 = entry_sum(JAd @ Am1 @ AJd)
    return odd, even0, even1


def flip_count_bruteforce(fv: FlipView, m: int, n: int, budget: int | None = None) -> int:
    """``p(m, n)``: points with ``sigma^m x = x`` and ``sigma^n F x = x``."""
    return count_points_fixed_by(fv.system, [(m, 0), (n, 1)], m, budget)


def flip_counts_bruteforce(fv: FlipView, m: int, budget: int | None = None) -> tuple[int, int, int]:
    return (
        flip_count_bruteforce(fv, 2 * m - 1, 0, budget),
        flip_count_bruteforce(fv, 2 * m, 0, budget),
        flip_count_bruteforce(fv, 2 * m, 1, budget),
    )


# --------------------------------------------------------------------------
# recoding a sliding-block reversal into matrix form


@dataclass(frozen=True)
class BlockSFT:
    """Shift of finite type given by its allowed blocks of length ``window``."""

    alphabet: tuple[str, ...]
    window: int
    allowed: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be positive")
        if any(len(b) != self.window for b in self.allowed):
            raise ValueError(f"allowed blocks must have length {self.window}")

    @classmethod
    def from_matrix(cls, alphabet: Sequence[str], A) -> BlockSFT:
        A = A if isinstance(A, IntMatrix) else IntMatrix.of(A)
        n = A.n
        allowed = frozenset((i, j) for i in range(n) for j in range(n) if A[i, j])
        return cls(tuple(alphabet), 2, allowed)

    @property
    def memory(self) -> int:
        return max(self.window - 1, 1)

    def _edge_blocks(self) -> frozenset[tuple[int, ...]]:
        if self.window >= 2:
            return self.allowed
        ok = {b[0] for b in self.allowed}
        return frozenset((a, b) for a in ok for b in ok)

    def _essential_edges(self) -> set[tuple[int, ...]]:
        edges = set(self._edge_blocks())
        while True:
            heads = {e[1:] for e in edges}
            tails = {e[:-1] for e in edges}
            keep = {e for e in edges if e[:-1] in heads and e[1:] in tails}
            if keep == edges:
                return edges
            edges = keep

    def blocks(self, n: int) -> list[tuple[int, ...]]:
        """Blocks of length ``n`` that occur in some point."""
        edges = self._essential_edges()
        w = self.memory + 1
        if n <= w:
            return sorted({e[i : i + n] for e in edges for i in range(w - n + 1)})
        nxt: dict[tuple, list[int]] = {}
        for e in edges:
            nxt.setdefault(e[:-1], []).append(e[-1])
        out = []
        stack = [list(e) for e in sorted(edges)]
        while stack:
            word = stack.pop()
            if len(word) == n:
                out.append(tuple(word))
                continue
            for s in nxt.get(tuple(word[-(w - 1):]), []):
                stack.append(word + [s])
        return sorted(out)

    def is_allowed_cyclic(self, word: Sequence[int]) -> bool:
        edges = self._edge_blocks()
        w = self.memory + 1
        P = len(word)
        return all(tuple(word[(i + k) % P] for k in range(w)) in edges for i in range(P))

    def periodic_words(self, period: int, budget: int | None = None) -> list[tuple[int, ...]]:
        """All cyclic words of length ``period`` whose every window is allowed."""
        budget = default_budget() if budget is None else budget
        edges = self._edge_blocks()
        w = self.memory + 1
        syms = sorted({s for e in edges for s in e})
        out = []
        work = 0
        stack: list[list[int]] = [[s] for s in syms]
        while stack:
            word = stack.pop()
            work += 1
            if work > budget:
                raise BudgetExceeded(f"brute-force budget of {budget} steps exceeded")
            if len(word) >= w and tuple(word[-w:]) not in edges:
                continue
            if len(word) == period:
                if self.is_allowed_cyclic(word):
                    out.append(tuple(word))
                continue
            for s in syms:
                stack.append(word + [s])
        return out


@dataclass(frozen=True)
class LocalReversalRule:
    """Sliding-block reversal ``R(x)_i = rule(x[c-i-s .. c-i+s])``.

    ``window_width = 2s + 1`` and ``c = offset``. Maps of this form satisfy
    ``sigma R = R sigma^-1`` identically, so validation only checks that
    ``R`` preserves the shift and has order dividing ``2r``.
    """

    window_width: int
    rule: Mapping[tuple[int, ...], int]
    r: int
    offset: int = 0

    def __post_init__(self):
        if self.window_width < 1 or self.window_width % 2 == 0:
            raise ValueError("window width must be odd and positive")

    @property
    def radius(self) -> int:
        return self.window_width // 2

    @classmethod
    def one_block(cls, tau: Sequence[int], r: int, offset: int = 0) -> LocalReversalRule:
        return cls(1, {(a,): t for a, t in enumerate(tau)}, r, offset)

    def apply_block(self, start: int, block: Sequence[int]) -> tuple[int, tuple[int, ...]]:
        """Image of a block covering positions ``start..start+len-1``.

        Returns the image's first position and its symbols. Raises
        ``KeyError`` when a window is outside the rule's domain.
        """
        s, c = self.radius, self.offset
        L = len(block)
        lo = c + s - start - L + 1
        hi = c - s - start
        out = []
        for i in range(lo, hi + 1):
            a = c - i - s - start
            out.append(self.rule[tuple(block[a : a + 2 * s + 1])])
        return lo, tuple(out)

    def apply_periodic(self, word: Sequence[int]) -> tuple[int, ...]:
        P = len(word)
        s, c = self.radius, self.offset
        return tuple(
            self.rule[tuple(word[(c - i - s + k) % P] for k in range(2 * s + 1))] for i in range(P)
        )


class RuleError(ValueError):
    def __init__(self, message: str, witness: tuple | None = None):
        super().__init__(message)
        self.witness = witness


def check_rule(X: BlockSFT, rule: LocalReversalRule) -> None:
    """Exact check that the rule defines a reversal of order dividing ``2r`` on ``X``."""
    s = rule.radius
    w = X.memory + 1
    for block in X.blocks(w + 2 * s):
        try:
            _, img = rule.apply_block(0, block)
        except KeyError as exc:
            raise RuleError(f"rule undefined on window {exc.args[0]}", tuple(block)) from None
        if tuple(img) not in X._edge_blocks():
            raise RuleError("image of an allowed block is not allowed", tuple(block))
    L = 4 * rule.r * s + 1
    for block in X.blocks(L):
        start, cur = 0, tuple(block)
        for _ in range(2 * rule.r):
            start, cur = rule.apply_block(start, cur)
        centre = (L - 1) // 2
        if start != centre or cur != (block[centre],):
            raise RuleError(f"R^{2 * rule.r} is not the identity", tuple(block))


def _tuple_code(X: BlockSFT, rule: LocalReversalRule, n: int):
    """The blocks of length ``n`` of the image of the 2r-tuple recoding."""
    r2 = 2 * rule.r
    spread = (r2 - 1) * rule.radius + abs(rule.offset)
    images = set()
    for block in X.blocks(n + 2 * spread):
        start = -spread
        powers = [(start, tuple(block))]
        for _ in range(r2 - 1):
            powers.append(rule.apply_block(*powers[-1]))
        word = []
        for i in range(n):
            comps = []
            for k, (p0, img) in enumerate(powers):
                pos = i if k % 2 == 0 else -i
                comps.append(img[pos - p0])
            word.append(tuple(comps))
        images.add(tuple(word))
    return spread, sorted(images)


def one_block_recode(X: BlockSFT, rule: LocalReversalRule) -> ReversalSFT:
    """Matrix form ``(A, J)`` of a sliding-block reversal system of finite type.

    Symbols are first replaced by the orbit tuples ``(x_0, phi(x)_0, ..., phi^{2r-1}(x)_0)``
    which makes the reversal one-block (symbol map: cyclic rotation of the
    tuple). The tuple shift is then presented on blocks of an odd length
    ``n`` beyond its memory. The resulting system is conjugate to the input
    after composing with ``sigma^((n-1)/2)``, recorded in ``meta``.
    """
    check_rule(X, rule)
    r = rule.r
    if rule.radius == 0 and rule.offset == 0 and X.memory == 1 and X.window <= 2:
        # already a one-block reversal of a vertex shift
        syms = sorted({s for b in X.blocks(1) for s in b})
        pos = {s: i for i, s in enumerate(syms)}
        edges = X._essential_edges()
        A = IntMatrix.of([[int((a, b) in edges) for b in syms] for a in syms])
        tau = [pos[rule.rule[(a,)]] for a in syms]
        names = tuple(X.alphabet[s] for s in syms)
        sys = validate(A, IntMatrix.permutation(tau), r, names)
        return replace(sys, meta={**sys.meta, "block_length": 1, "shift_conjugacy": 0})
    memory_guess = max(X.memory + 1, 2 * ((2 * r - 1) * rule.radius + abs(rule.offset)) + 1) - 1
    n = memory_guess + 1 if memory_guess % 2 == 0 else memory_guess + 2
    _, verts = _tuple_code(X, rule, n)
    index = {v: i for i, v in enumerate(verts)}
    N = len(verts)
    A = [[0] * N for _ in range(N)]
    by_prefix: dict[tuple, list[int]] = {}
    for j, v in enumerate(verts):
        by_prefix.setdefault(v[:-1], []).append(j)
    for i, u in enumerate(verts):
        for j in by_prefix.get(u[1:], []):
            A[i][j] = 1
    tau = []
    for u in verts:
        rotated = tuple(tuple(t[1:] + t[:1]) for t in reversed(u))
        if rotated not in index:
            raise RuleError("tuple shift is not closed under the reversal", u)
        tau.append(index[rotated])
    names = tuple(
        ".".join("".join(X.alphabet[c] for c in t) for t in v) for v in verts
    )
    sys = validate(IntMatrix.of(A), IntMatrix.permutation(tau), r, names)
    return replace(sys, meta={**sys.meta, "block_length": n, "shift_conjugacy": (n - 1) // 2})


def original_fixed_count(
    X: BlockSFT, rule: LocalReversalRule, m: int, l: int, budget: int | None = None
) -> int:
    """Brute-force ``f(m, 2l)`` on the unrecoded presentation."""
    period = m * order_of_b_power(2 * l, rule.r)
    count = 0
    for word in X.periodic_words(period, budget):
        y = tuple(word)
        for _ in range(2 * l):
            y = rule.apply_periodic(y)
        # (sigma^m y)_i = y_{i+m}
        if all(y[(i + m) % period] == word[i] for i in range(period)):
            count += 1
    return count


# --------------------------------------------------------------------------
# random systems


def random_symbol_map(rng, n: int, r: int) -> tuple[int, ...]:
    """Random permutation of ``range(n)`` whose cycle lengths divide ``2r``."""
    lengths = [d for d in range(1, 2 * r + 1) if (2 * r) % d == 0]
    syms = list(range(n))
    rng.shuffle(syms)
    tau = [0] * n
    i = 0
    while i < n:
        d = rng.choice([d for d in lengths if d <= n - i])
        cyc = syms[i : i + d]
        for k, s in enumerate(cyc):
            tau[s] = cyc[(k + 1) % d]
        i += d
    return tuple(tau)


def random_reversal_sft(rng, n: int, r: int, density: float = 0.6) -> ReversalSFT:
    """Random ``(A, J)`` with ``A(a, b) = A(tau(b), tau(a))``.

    Entries are sampled on orbits of ``(a, b) -> (tau(b), tau(a))`` so the
    reversal law holds by construction.
    """
    tau = random_symbol_map(rng, n, r)
    A = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if A[a][b] is not None:
                continue
            v = int(rng.random() < density)
            p, q = a, b
            while A[p][q] is None:
                A[p][q] = v
                p, q = tau[q], tau[p]
    return validate(A, IntMatrix.permutation(tau), r)
