"""Backtracking enumeration of periodic configurations fixed by group elements.

This is the oracle side of every cross-check: it never forms a matrix
power or a trace. A configuration is a cyclic word ``x_0 .. x_{P-1}``;
a condition ``(n, e)`` demands ``x_i = tau^e(x_{(-1)^e (i + n) mod P})``
for all ``i``, which is the fixed-point equation of ``T^n R^e`` for a
one-block reversal with symbol map ``tau``.
"""
from __future__ import annotations

import os
from typing import Protocol, Sequence

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    env = os.environ.get("REVZETA_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


def perm_power(tau: Sequence[int], e: int) -> tuple[int, ...]:
    n = len(tau)
    out = list(range(n))
    if e < 0:
        inv = [0] * n
        for i, t in enumerate(tau):
            inv[t] = i
        tau, e = inv, -e
    for _ in range(e):
        out = [tau[s] for s in out]
    return tuple(out)


def perm_order(tau: Sequence[int]) -> int:
    ident = tuple(range(len(tau)))
    cur = tuple(tau)
    k = 1
    while cur != ident:
        cur = tuple(tau[s] for s in cur)
        k += 1
    return k


class Walker(Protocol):
    """Incremental validity check of a word read left to right."""

    def start(self, sym: int): ...

    def step(self, state, sym: int): ...  # None when the prefix is impossible

    def close(self, state, first: int) -> bool: ...


class MatrixWalker:
    """Words that are paths in a zero-one matrix (vertex shift)."""

    def __init__(self, adjacency: Sequence[Sequence[int]]):
        self.adj = adjacency

    def start(self, sym):
        return sym

    def step(self, state, sym):
        return sym if self.adj[state][sym] else None

    def close(self, state, first):
        return bool(self.adj[state][first])


class RelationWalker:
    """Words labelling paths in a labelled graph; closing needs a cycle.

    ``succ[label][q]`` is the bitmask of targets of ``label``-edges out of ``q``.
    """

    def __init__(self, succ: Sequence[Sequence[int]], n_states: int):
        self.succ = succ
        self.n = n_states

    def start(self, sym):
        rel = tuple(self.succ[sym])
        return rel if any(rel) else None

    def step(self, state, sym):
        table = self.succ[sym]
        rel = []
        nonempty = False
        for mask in state:
            out = 0
            q = 0
            while mask:
                if mask & 1:
                    out |= table[q]
                mask >>= 1
                q += 1
            rel.append(out)
            nonempty = nonempty or bool(out)
        return tuple(rel) if nonempty else None

    def close(self, state, first):
        return relation_has_cycle(state, self.n)


def compose(rel: Sequence[int], other: Sequence[int]) -> tuple[int, ...]:
    out = []
    for mask in rel:
        acc = 0
        q = 0
        while mask:
            if mask & 1:
                acc |= other[q]
            mask >>= 1
            q += 1
        out.append(acc)
    return tuple(out)


def relation_has_cycle(rel: Sequence[int], n: int) -> bool:
    cur = tuple(rel)
    for _ in range(n):
        if any(cur[p] >> p & 1 for p in range(n)):
            return True
        cur = compose(cur, rel)
    return False


def _classes(period: int, conditions, tau: Sequence[int]):
    """Group positions linked by conditions.

    Returns ``root[i]``, ``rel[i]`` with ``x_i = rel[i][x_root[i]]`` and for
    each root the set of symbols it may take.
    """
    n = len(tau)
    links: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(period)]
    for shift, e in conditions:
        p = perm_power(tau, e)
        pinv = perm_power(tau, -e)
        sign = -1 if e % 2 else 1
        for i in range(period):
            j = (sign * (i + shift)) % period
            links[i].append((j, pinv))  # x_j = tau^-e(x_i)
            links[j].append((i, p))  # x_i = tau^e(x_j)
    root = [-1] * period
    rel: list[tuple[int, ...] | None] = [None] * period
    allowed: dict[int, set[int]] = {}
    ident = tuple(range(n))
    for start in range(period):
        if root[start] != -1:
            continue
        root[start] = start
        rel[start] = ident
        ok = set(range(n))
        stack = [start]
        while stack:
            i = stack.pop()
            ri = rel[i]
            for j, p in links[i]:
                rj = tuple(p[ri[s]] for s in range(n))
                if root[j] == -1:
                    root[j] = start
                    rel[j] = rj
                    stack.append(j)
                elif rel[j] != rj:
                    ok = {s for s in ok if rel[j][s] == rj[s]}
        allowed[start] = ok
    return root, rel, allowed


def count_fixed_configurations(
    n_symbols: int,
    period: int,
    conditions: Sequence[tuple[int, int]],
    tau: Sequence[int],
    walker: Walker,
    budget: int | None = None,
    symbols: Sequence[int] | None = None,
) -> int:
    """Number of cyclic words of length ``period`` accepted by ``walker``
    and satisfying every condition."""
    if period < 1:
        raise ValueError("period must be positive")
    budget = default_budget() if budget is None else budget
    if n_symbols == 0:
        return 0
    root, rel, allowed = _classes(period, conditions, tau)
    pool = range(n_symbols) if symbols is None else symbols
    choices = {r: [s for s in pool if s in ok] for r, ok in allowed.items()}
    x = [0] * period
    work = 0
    count = 0

    # iterative DFS over positions, branching only at class roots
    def options(i):
        if root[i] == i:
            return choices[i]
        return (rel[i][x[root[i]]],)

    stack: list[tuple[int, object, list, int]] = []
    opts0 = list(options(0))
    stack.append((0, None, opts0, 0))
    while stack:
        i, state, opts, k = stack.pop()
        if k >= len(opts):
            continue
        stack.append((i, state, opts, k + 1))
        sym = opts[k]
        work += 1
        if work > budget:
            raise BudgetExceeded(f"brute-force budget of {budget} steps exceeded")
        x[i] = sym
        new = walker.start(sym) if i == 0 else walker.step(state, sym)
        if new is None:
            continue
        if i == period - 1:
            if walker.close(new, x[0]):
                count += 1
            continue
        stack.append((i + 1, new, list(options(i + 1)), 0))
    return count


def enumerate_words(n_symbols: int, length: int, walker: Walker, budget: int | None = None):
    """Yield ``(word, walker_state)`` for every word of ``length`` the walker accepts."""
    budget = default_budget() if budget is None else budget
    work = 0
    word: list[int] = []

    def rec(state):
        nonlocal work
        if len(word) == length:
            yield tuple(word), state
            return
        for s in range(n_symbols):
            work += 1
            if work > budget:
                raise BudgetExceeded(f"brute-force budget of {budget} steps exceeded")
            new = walker.start(s) if not word else walker.step(state, s)
            if new is None:
                continue
            word.append(s)
            yield from rec(new)
            word.pop()

    yield from rec(None)
