"""The group ``G_2r = <a, b | ab = b a^-1, b^2r = 1>`` and its finite-index subgroups.

Elements are kept in the normal form ``a^n b^k`` with ``0 <= k < 2r``.
Finite-index subgroups come in two families:

* ``F1(m, l, k) = <a^m b^2l, b^2k>`` with ``0 <= l < k <= r``, ``k | r``,
  index ``2km``; these act by automorphisms.
* ``F2(m, j, k) = <a^m, a^j b^(2k-1)>`` with ``0 <= j < m``, ``(2k-1) | r``,
  index ``(2k-1)m``; these contain reversals.

:func:`coset_enumeration_index` is a Todd-Coxeter enumeration that knows
nothing about the families and is used to check them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Literal


@dataclass(frozen=True, order=True)
class GroupElement:
    """``a^exp_a b^exp_b`` in ``G_2r`` with ``r = order_r``."""

    exp_a: int
    exp_b: int
    order_r: int

    def __post_init__(self):
        if self.order_r < 1:
            raise ValueError("order_r must be positive")
        object.__setattr__(self, "exp_b", self.exp_b % (2 * self.order_r))

    @classmethod
    def identity(cls, r: int) -> GroupElement:
        return cls(0, 0, r)

    @classmethod
    def a(cls, r: int, n: int = 1) -> GroupElement:
        return cls(n, 0, r)

    @classmethod
    def b(cls, r: int, k: int = 1) -> GroupElement:
        return cls(0, k, r)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return g_mul(self, other)

    def inverse(self) -> GroupElement:
        # (a^n b^k)^-1 = b^-k a^-n = a^{-(-1)^k n} b^-k
        sign = -1 if self.exp_b % 2 else 1
        return GroupElement(-sign * self.exp_a, -self.exp_b, self.order_r)

    def __pow__(self, e: int) -> GroupElement:
        base = self if e >= 0 else self.inverse()
        out = GroupElement.identity(self.order_r)
        for _ in range(abs(e)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self.exp_a == 0 and self.exp_b == 0

    def word(self) -> str:
        """Word in the letters ``a, A = a^-1, b``."""
        head = "a" * self.exp_a if self.exp_a >= 0 else "A" * (-self.exp_a)
        return head + "b" * self.exp_b

    def __str__(self) -> str:
        parts = []
        if self.exp_a:
            parts.append("a" if self.exp_a == 1 else f"a^{self.exp_a}")
        if self.exp_b:
            parts.append("b" if self.exp_b == 1 else f"b^{self.exp_b}")
        return "".join(parts) or "1"


class OrderMismatch(ValueError):
    pass


def g_mul(x: GroupElement, y: GroupElement) -> GroupElement:
    if x.order_r != y.order_r:
        raise OrderMismatch(f"cannot multiply elements of G_{2 * x.order_r} and G_{2 * y.order_r}")
    sign = -1 if x.exp_b % 2 else 1
    return GroupElement(x.exp_a + sign * y.exp_a, x.exp_b + y.exp_b, x.order_r)


def order_of_b_power(i: int, r: int) -> int:
    """Order of ``b^i`` in ``G_2r``; 1 for ``i = 0``."""
    i %= 2 * r
    if i == 0:
        return 1
    return 2 * r // gcd(i, 2 * r)


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# --------------------------------------------------------------------------
# subgroup descriptors


@dataclass(frozen=True)
class SubgroupDescriptor:
    family: Literal["F1", "F2"]
    m: int
    k: int
    r: int
    l: int = 0
    j: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.family == "F1":
            if not (0 <= self.l < self.k <= self.r) or self.r % self.k:
                raise ValueError(f"invalid F1 parameters l={self.l}, k={self.k} for r={self.r}")
            if self.j:
                raise ValueError("F1 descriptors carry no j")
        elif self.family == "F2":
            d = 2 * self.k - 1
            if self.k < 1 or self.r % d or not (0 <= self.j < self.m):
                raise ValueError(f"invalid F2 parameters j={self.j}, k={self.k}, m={self.m} for r={self.r}")
            if self.l:
                raise ValueError("F2 descriptors carry no l")
        else:
            raise ValueError(f"unknown family {self.family!r}")

    @property
    def index(self) -> int:
        if self.family == "F1":
            return 2 * self.k * self.m
        return (2 * self.k - 1) * self.m

    def generators(self) -> list[GroupElement]:
        r = self.r
        if self.family == "F1":
            return [GroupElement(self.m, 2 * self.l, r), GroupElement(0, 2 * self.k, r)]
        return [GroupElement(self.m, 0, r), GroupElement(self.j, 2 * self.k - 1, r)]

    def sort_key(self) -> tuple:
        return (self.index, self.family, self.m, self.l, self.j, self.k)

    def __str__(self) -> str:
        if self.family == "F1":
            return f"F1(m={self.m},l={self.l},k={self.k})@r={self.r}"
        return f"F2(m={self.m},j={self.j},k={self.k})@r={self.r}"

    @classmethod
    def parse(cls, text: str) -> SubgroupDescriptor:
        match = re.fullmatch(r"\s*(F[12])\(([^)]*)\)@r=(\d+)\s*", text)
        if not match:
            raise ValueError(f"cannot parse subgroup descriptor {text!r}")
        fam, body, r = match.groups()
        params = {}
        for part in body.split(","):
            key, _, val = part.partition("=")
            params[key.strip()] = int(val)
        return cls(family=fam, r=int(r), **params)


def enumerate_subgroups(r: int, index_max: int) -> list[tuple[SubgroupDescriptor, int]]:
    """All finite-index subgroups of ``G_2r`` with index at most ``index_max``."""
    out = []
    for k in divisors(r):
        for m in range(1, index_max // (2 * k) + 1):
            for l in range(k):
                out.append(SubgroupDescriptor("F1", m=m, k=k, l=l, r=r))
    for d in divisors(r):
        if d % 2 == 0:
            continue
        k = (d + 1) // 2
        for m in range(1, index_max // d + 1):
            for j in range(m):
                out.append(SubgroupDescriptor("F2", m=m, k=k, j=j, r=r))
    out.sort(key=SubgroupDescriptor.sort_key)
    return [(d, d.index) for d in out]


@dataclass(frozen=True)
class FixedPointSpec:
    """Conditions a point must meet to be fixed by a whole subgroup.

    Each condition ``(n, e)`` means ``T^n R^e x = x``. ``subsystem_hint``
    names the ``X_2l`` that any fixed point lies in, when known. Every
    fixed point has ``T^period x = x``.
    """

    conditions: tuple[tuple[int, int], ...]
    subsystem_hint: int | None = None
    period: int = 1


def subgroup_fixed_spec(d: SubgroupDescriptor) -> FixedPointSpec:
    r = d.r
    if d.family == "F1":
        conds = [(d.m, 2 * d.l)]
        if d.k != r:
            conds.append((0, 2 * d.k))
        period = d.m * order_of_b_power(2 * d.l, r)
        return FixedPointSpec(tuple(conds), subsystem_hint=2 * d.k, period=period)
    odd = 2 * d.k - 1
    return FixedPointSpec(((d.m, 0), (d.j, odd)), subsystem_hint=2 * odd, period=d.m)


# --------------------------------------------------------------------------
# Todd-Coxeter


class CosetBoundExceeded(RuntimeError):
    pass


_GENS = "aAbB"
_INV = {0: 1, 1: 0, 2: 3, 3: 2}


def _word(element: GroupElement) -> list[int]:
    return [_GENS.index(c) for c in element.word()]


class _CosetTable:
    """HLT coset enumeration with coincidence handling."""

    def __init__(self, bound: int):
        self.bound = bound
        self.table: list[list[int | None]] = [[None] * 4]
        self.parent = [0]

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> None:
        if len(self.table) >= self.bound:
            raise CosetBoundExceeded(f"more than {self.bound} cosets defined")
        d = len(self.table)
        self.table.append([None] * 4)
        self.parent.append(d)
        self.table[c][x] = d
        self.table[d][_INV[x]] = c

    def merge(self, k: int, l: int, queue: list[int]) -> None:
        p, q = self.rep(k), self.rep(l)
        if p != q:
            lo, hi = min(p, q), max(p, q)
            self.parent[hi] = lo
            queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self.merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(4):
                d = self.table[g][x]
                if d is None:
                    continue
                self.table[d][_INV[x]] = None
                mu, nu = self.rep(g), self.rep(d)
                if self.table[mu][x] is not None:
                    self.merge(nu, self.table[mu][x], queue)
                elif self.table[nu][_INV[x]] is not None:
                    self.merge(mu, self.table[nu][_INV[x]], queue)
                else:
                    self.table[mu][x] = nu
                    self.table[nu][_INV[x]] = mu

    def scan_and_fill(self, c: int, w: list[int]) -> None:
        t = self.table
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] is not None:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][_INV[w[j]]] is not None:
                b = t[b][_INV[w[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][_INV[w[i]]] = f
                return
            self.define(f, w[i])

    def run(self, relators: list[list[int]], subgroup: list[list[int]]) -> None:
        for w in subgroup:
            self.scan_and_fill(0, w)
        c = 0
        while c < len(self.table):
            if self.alive(c):
                for rel in relators:
                    self.scan_and_fill(c, rel)
                    if not self.alive(c):
                        break
                if self.alive(c):
                    for x in range(4):
                        if self.table[c][x] is None:
                            self.define(c, x)
            c += 1

    def standard(self) -> tuple[tuple[int, ...], ...]:
        """Coset table relabelled in breadth-first order from the subgroup coset."""
        live = [c for c in range(len(self.table)) if self.alive(c)]
        label = {0: 0}
        order = [0]
        i = 0
        while i < len(order):
            c = order[i]
            i += 1
            for x in range(4):
                d = self.rep(self.table[c][x])
                if d not in label:
                    label[d] = len(order)
                    order.append(d)
        assert len(order) == len(live)
        return tuple(tuple(label[self.rep(self.table[c][x])] for x in range(4)) for c in order)


def _relators(r: int) -> list[list[int]]:
    # a b a b^-1 and b^2r
    return [[0, 2, 0, 3], [2] * (2 * r)]


def coset_table(generators: Iterable[GroupElement], r: int, coset_bound: int):
    gens = list(generators)
    for g in gens:
        if g.order_r != r:
            raise OrderMismatch(f"generator {g} is not in G_{2 * r}")
    if not gens:
        raise CosetBoundExceeded("trivial subgroup has infinite index")
    tc = _CosetTable(coset_bound)
    tc.run(_relators(r), [_word(g) for g in gens if not g.is_identity()])
    return tc


def coset_enumeration_index(
    generators: Iterable[GroupElement], r: int, coset_bound: int
) -> int | Literal["exceeded"]:
    """Index of the subgroup generated by ``generators``, or ``"exceeded"``."""
    if coset_bound < 1:
        raise ValueError("coset_bound must be at least 1")
    try:
        tc = coset_table(generators, r, coset_bound)
    except CosetBoundExceeded:
        return "exceeded"
    return sum(1 for c in range(len(tc.table)) if tc.alive(c))


def standard_coset_table(generators: Iterable[GroupElement], r: int, coset_bound: int = 10_000):
    return coset_table(generators, r, coset_bound).standard()
