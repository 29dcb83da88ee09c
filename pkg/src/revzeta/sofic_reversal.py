"""Sofic shift-reversal systems through labelled graph presentations.

A presentation is a labelled graph whose bi-infinite label sequences form
the sofic shift ``X``. The reversal is one-block with label map ``tau``:
``phi(x)_i = tau(x_{-i})``. Counting goes through Krieger's joint state
chain, an SFT cover ``(A, J)`` with a labelling and no graph diamonds, and
then through signed subset matrices ``A_k``, ``J_k``.

Relations of words are tuples of bitmasks: ``rel[q]`` is the set of
states reachable from ``q`` by reading the word.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bruteforce import (
    BudgetExceeded,
    RelationWalker,
    compose,
    count_fixed_configurations,
    default_budget,
    perm_power,
)
from .exact_algebra import IntMatrix, diag, entry_sum
from .group_g2r import order_of_b_power
from .sft_reversal import (
    NotPermutation,
    ReversalSFT,
    ValidationError,
    random_symbol_map,
    true_half_order,
    validate,
)


class EmptyShift(ValidationError):
    code = "empty-shift"


class ClosureViolation(ValidationError):
    """The labelled language is not mapped onto itself by the reversal."""

    code = "not-tau-closed"


class ChainPropertyError(RuntimeError):
    def __init__(self, message: str, certificate: dict | None = None):
        super().__init__(message)
        self.certificate = certificate


class InclusionExclusionViolated(RuntimeError):
    pass


def _bits(mask: int):
    q = 0
    while mask:
        if mask & 1:
            yield q
        mask >>= 1
        q += 1


# --------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class LabeledPresentation:
    """Labelled graph with a label permutation ``tau`` of order dividing ``2r``.

    ``edges`` holds ``(source, target, label)`` index triples into
    ``states`` and ``labels``.
    """

    states: tuple[str, ...]
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, int], ...]
    tau: tuple[int, ...]
    r: int

    def __post_init__(self):
        n, L = len(self.states), len(self.labels)
        for p, q, a in self.edges:
            if not (0 <= p < n and 0 <= q < n and 0 <= a < L):
                raise ValueError(f"edge {(p, q, a)} out of range")
        if sorted(self.tau) != list(range(L)):
            raise NotPermutation("tau is not a bijection of the label alphabet")
        if self.r < 1 or perm_power(self.tau, 2 * self.r) != tuple(range(L)):
            raise ValidationError(f"tau^{2 * self.r} is not the identity")

    @classmethod
    def build(cls, edges, tau: Mapping, r: int, states=None, labels=None) -> LabeledPresentation:
        """From named edges ``(source, target, label)`` and a label map ``tau``."""
        edges = [tuple(map(str, e)) for e in edges]
        if states is None:
            states = sorted({e[0] for e in edges} | {e[1] for e in edges}, key=_natural)
        if labels is None:
            labels = sorted({e[2] for e in edges} | {str(k) for k in tau}, key=_natural)
        states, labels = tuple(map(str, states)), tuple(map(str, labels))
        sidx = {s: i for i, s in enumerate(states)}
        lidx = {a: i for i, a in enumerate(labels)}
        tau = {str(k): str(v) for k, v in tau.items()}
        missing = [a for a in labels if a not in tau]
        if missing:
            raise NotPermutation(f"tau undefined on labels {missing}")
        t = tuple(lidx[tau[a]] for a in labels)
        es = tuple(sorted({(sidx[p], sidx[q], lidx[a]) for p, q, a in edges}))
        return cls(states, labels, es, t, r)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def succ(self) -> list[list[int]]:
        """``succ[a][q]``: bitmask of targets of ``a``-edges leaving ``q``."""
        out = [[0] * self.n_states for _ in self.labels]
        for p, q, a in self.edges:
            out[a][p] |= 1 << q
        return out

    def reversed(self) -> LabeledPresentation:
        return LabeledPresentation(
            self.states, self.labels, tuple(sorted((q, p, a) for p, q, a in self.edges)), self.tau, self.r
        )

    def relabeled(self, perm: Sequence[int]) -> LabeledPresentation:
        return LabeledPresentation(
            self.states, self.labels, tuple(sorted((p, q, perm[a]) for p, q, a in self.edges)), self.tau, self.r
        )

    def restrict_labels(self, keep: Sequence[int], tau: Sequence[int], r: int) -> LabeledPresentation:
        """Subgraph on edges with labels in ``keep``; ``tau`` must preserve ``keep``."""
        keep = sorted(keep)
        pos = {a: i for i, a in enumerate(keep)}
        return LabeledPresentation(
            self.states,
            tuple(self.labels[a] for a in keep),
            tuple((p, q, pos[a]) for p, q, a in self.edges if a in pos),
            tuple(pos[tau[a]] for a in keep),
            r,
        )

    def to_document(self) -> dict:
        return {
            "kind": "sofic",
            "order": 2 * self.r,
            "states": list(self.states),
            "label_alphabet": list(self.labels),
            "edges": [
                {"from": self.states[p], "to": self.states[q], "label": self.labels[a]}
                for p, q, a in self.edges
            ],
            "tau": {self.labels[a]: self.labels[t] for a, t in enumerate(self.tau)},
        }


def _natural(s: str):
    return (0, int(s), "") if s.lstrip("-").isdigit() else (1, 0, s)


def trim_essential(p: LabeledPresentation) -> LabeledPresentation:
    """Drop states without incoming or outgoing edges until nothing changes."""
    alive = set(range(p.n_states))
    edges = list(p.edges)
    while True:
        edges = [e for e in edges if e[0] in alive and e[1] in alive]
        has_out = {e[0] for e in edges}
        has_in = {e[1] for e in edges}
        new = alive & has_out & has_in
        if new == alive:
            break
        alive = new
    if not alive:
        raise EmptyShift("presentation presents the empty shift")
    keep = sorted(alive)
    pos = {s: i for i, s in enumerate(keep)}
    return LabeledPresentation(
        tuple(p.states[s] for s in keep),
        p.labels,
        tuple(sorted((pos[a], pos[b], c) for a, b, c in edges)),
        p.tau,
        p.r,
    )


# --------------------------------------------------------------------------
# languages of state sets


class _Graph:
    """Deterministic view of a labelled graph on state subsets."""

    def __init__(self, succ: Sequence[Sequence[int]]):
        self.succ = [tuple(row) for row in succ]

    def step(self, mask: int, a: int) -> int:
        row = self.succ[a]
        out = 0
        for q in _bits(mask):
            out |= row[q]
        return out


def _included(g1: _Graph, m1: int, g2: _Graph, m2: int, cache: dict | None = None) -> bool:
    """Every finite word readable from ``m1`` in ``g1`` is readable from ``m2`` in ``g2``.

    For essential graphs this is inclusion of the right-infinite languages.
    """
    key = (m1, m2)
    if cache is not None and key in cache:
        return cache[key]
    seen = {key}
    todo = deque([key])
    ok = True
    n_labels = len(g1.succ)
    while todo and ok:
        a1, a2 = todo.popleft()
        for a in range(n_labels):
            b1 = g1.step(a1, a)
            if not b1:
                continue
            b2 = g2.step(a2, a)
            if not b2:
                ok = False
                break
            if (b1, b2) not in seen:
                seen.add((b1, b2))
                todo.append((b1, b2))
    if cache is not None:
        cache[key] = ok
    return ok


def _saturate(target: _Graph, n: int, source: _Graph, mask: int, cache: dict) -> int:
    """``{q : L_target(q) subset of L_source(mask)}``."""
    out = 0
    for q in range(n):
        if _included(target, 1 << q, source, mask, cache):
            out |= 1 << q
    return out


def language_equal(g1: _Graph, m1: int, g2: _Graph, m2: int) -> bool:
    return _included(g1, m1, g2, m2) and _included(g2, m2, g1, m1)


def check_tau_closed(p: LabeledPresentation) -> None:
    """Exact check that ``tau`` applied to reversed words preserves the language."""
    g = _Graph(p.succ())
    h = _Graph(p.reversed().relabeled(p.tau).succ())
    full = (1 << p.n_states) - 1
    if not _included(g, full, h, full):
        raise ClosureViolation("some word's reversed tau-image is not in the language")
    if not _included(h, full, g, full):
        raise ClosureViolation("language is not the reversed tau-image of itself")


# --------------------------------------------------------------------------
# futures and pasts


def transition_semigroup(succ: Sequence[Sequence[int]], n: int, budget: int | None = None):
    """All relations of nonempty words, by breadth-first closure."""
    budget = default_budget() if budget is None else budget
    gens = [tuple(row) for row in succ]
    seen = set()
    todo = deque()
    for g in gens:
        if g not in seen:
            seen.add(g)
            todo.append(g)
    while todo:
        rel = todo.popleft()
        for g in gens:
            new = compose(rel, g)
            if new not in seen:
                seen.add(new)
                if len(seen) > budget:
                    raise BudgetExceeded(f"transition monoid exceeds budget of {budget} elements")
                todo.append(new)
    return seen


def _stabilized_sets(succ, n: int, budget: int | None) -> set[int]:
    """Terminal sets of left-infinite rays: ``All.e.m`` closed under steps."""
    full = (1 << n) - 1
    g = _Graph(succ)
    starts = set()
    for e in transition_semigroup(succ, n, budget):
        if compose(e, e) == e:
            m = 0
            for q in _bits(full):
                m |= e[q]
            if m:
                starts.add(m)
    out = set(starts)
    todo = deque(starts)
    while todo:
        m = todo.popleft()
        for a in range(len(succ)):
            m2 = g.step(m, a)
            if m2 and m2 not in out:
                out.add(m2)
                todo.append(m2)
    return out


def _stabilized_sets_by_words(succ, n: int, max_len: int) -> set[int]:
    """Fallback: rays ``v^inf u`` with ``|v|, |u| <= max_len``."""
    g = _Graph(succ)
    L = len(succ)
    full = (1 << n) - 1
    out = set()

    def run(mask, word):
        for a in word:
            mask = g.step(mask, a)
        return mask

    for lv in range(1, max_len + 1):
        for v in itertools.product(range(L), repeat=lv):
            cur = full
            while True:
                nxt = run(cur, v)
                if nxt == cur:
                    break
                cur = nxt
            if not cur:
                continue
            for lu in range(0, max_len + 1):
                for u in itertools.product(range(L), repeat=lu):
                    m = run(cur, u)
                    if m:
                        out.add(m)
    return out


def _canonical_sets(succ, n: int, raw: set[int]) -> tuple[int, ...]:
    g = _Graph(succ)
    cache: dict = {}
    return tuple(sorted({_saturate(g, n, g, m, cache) for m in raw}))


def compute_futures(p: LabeledPresentation, budget: int | None = None) -> tuple[int, ...]:
    """Futures as saturated terminal-state sets (bitmasks over ``p.states``)."""
    succ = p.succ()
    return _canonical_sets(succ, p.n_states, _stabilized_sets(succ, p.n_states, budget))


def compute_pasts(p: LabeledPresentation, budget: int | None = None) -> tuple[int, ...]:
    """Pasts as saturated initial-state sets, i.e. futures of the reversed graph."""
    return compute_futures(p.reversed(), budget)


def compute_futures_by_words(p: LabeledPresentation, max_len: int = 4) -> tuple[int, ...]:
    succ = p.succ()
    return _canonical_sets(succ, p.n_states, _stabilized_sets_by_words(succ, p.n_states, max_len))


def mask_names(p: LabeledPresentation, mask: int) -> list[str]:
    return [p.states[q] for q in _bits(mask)]


# --------------------------------------------------------------------------
# the joint state chain


@dataclass(frozen=True)
class JointState:
    future: int
    symbol: int
    past: int


@dataclass(frozen=True)
class JointStateChain:
    """Essential part of Krieger's joint state chain with its reversal.

    ``system`` carries ``(A, J)``; ``labeling[i]`` is the label index of
    chain state ``i``.
    """

    presentation: LabeledPresentation
    states: tuple[JointState, ...]
    system: ReversalSFT
    labeling: tuple[int, ...]
    futures: tuple[int, ...]
    pasts: tuple[int, ...]
    certificate: Mapping[str, object]

    @property
    def r(self) -> int:
        return self.system.r

    @property
    def tau(self) -> tuple[int, ...]:
        return self.presentation.tau

    def describe(self) -> list[str]:
        p = self.presentation
        out = []
        for s in self.states:
            out.append(
                "({" + ",".join(mask_names(p, s.future)) + "}, "
                + p.labels[s.symbol]
                + ", {" + ",".join(mask_names(p, s.past)) + "})"
            )
        return out


def build_joint_state_chain(p: LabeledPresentation, budget: int | None = None, trim: bool = True) -> JointStateChain:
    """Joint states ``(F, a, P)`` with ``F(a)`` and ``P(a)`` nonempty.

    ``A`` links ``(F1, a1, P1) -> (F2, a2, P2)`` when ``F1(a1) = F2`` and
    ``P1 = P2(a2)``; ``J`` sends ``(F, a, P)`` to
    ``(tau_-(P), tau(a), tau_+(F))``. With ``trim`` only states on
    bi-infinite paths are kept; periodic points and all trace counts live
    there.
    """
    p = trim_essential(p)
    check_tau_closed(p)
    n = p.n_states
    succ = p.succ()
    rsucc = p.reversed().succ()
    g, gr = _Graph(succ), _Graph(rsucc)
    futures = compute_futures(p, budget)
    pasts = compute_pasts(p, budget)
    fset, pset = set(futures), set(pasts)
    cache_f: dict = {}
    cache_p: dict = {}

    def fut_step(F, a):
        m = g.step(F, a)
        return _saturate(g, n, g, m, cache_f) if m else 0

    def past_step(P, a):
        m = gr.step(P, a)
        return _saturate(gr, n, gr, m, cache_p) if m else 0

    # tau_+ : future over G -> past; tau_- : past -> future
    tau_g = _Graph(p.relabeled(p.tau).succ())
    tau_gr = _Graph(p.reversed().relabeled(p.tau).succ())
    cache_x: dict = {}
    cache_y: dict = {}

    def tau_plus(F):
        Q = _saturate(gr, n, tau_g, F, cache_x)
        if Q not in pset or not _included(tau_g, F, gr, Q):
            raise ClosureViolation(f"tau-image of future {mask_names(p, F)} is not a past")
        return Q

    def tau_minus(P):
        S = _saturate(g, n, tau_gr, P, cache_y)
        if S not in fset or not _included(tau_gr, P, g, S):
            raise ClosureViolation(f"tau-image of past {mask_names(p, P)} is not a future")
        return S

    joint = []
    for F in futures:
        for a in range(p.n_labels):
            Fa = fut_step(F, a)
            if not Fa:
                continue
            for P in pasts:
                if past_step(P, a):
                    joint.append(JointState(F, a, P))
    fa = {s: fut_step(s.future, s.symbol) for s in joint}
    pa = {s: past_step(s.past, s.symbol) for s in joint}
    by_future: dict[int, list[JointState]] = {}
    for s in joint:
        by_future.setdefault(s.future, []).append(s)
    adj: dict[JointState, list[JointState]] = {
        s: [t for t in by_future.get(fa[s], []) if pa[t] == s.past] for s in joint
    }
    keep = set(joint)
    if trim:
        while True:
            has_in = {t for s in keep for t in adj[s] if t in keep}
            new = {s for s in keep if s in has_in and any(t in keep for t in adj[s])}
            if new == keep:
                break
            keep = new
    states = tuple(sorted(keep, key=lambda s: (s.symbol, s.future, s.past)))
    if not states:
        raise EmptyShift("joint state chain is empty")
    idx = {s: i for i, s in enumerate(states)}
    N = len(states)
    A = [[0] * N for _ in range(N)]
    for s in states:
        for t in adj[s]:
            if t in idx:
                A[idx[s]][idx[t]] = 1
    tau_j = []
    for s in states:
        img = JointState(tau_minus(s.past), p.tau[s.symbol], tau_plus(s.future))
        if img not in idx:
            raise ChainPropertyError(f"J image of joint state {s} is not a joint state")
        tau_j.append(idx[img])
    labeling = tuple(s.symbol for s in states)
    names = tuple(f"j{i}" for i in range(N))
    A_m = IntMatrix.of(A)
    J_m = IntMatrix.permutation(tau_j)
    cert = check_properties(A_m, J_m, labeling, p.tau, p.r)
    if not cert["pass"]:
        raise ChainPropertyError("joint state chain fails its property checks", cert)
    system = validate(A_m, J_m, p.r, names)
    cert = {
        **cert,
        "futures": len(futures),
        "pasts": len(pasts),
        "joint_states": len(joint),
        "essential_joint_states": N,
    }
    return JointStateChain(p, states, system, labeling, futures, pasts, cert)


# --------------------------------------------------------------------------
# property checks


def _trim_matrix(A: IntMatrix) -> list[int]:
    alive = set(range(A.n))
    while True:
        new = {
            i
            for i in alive
            if any(A[i, j] for j in alive) and any(A[j, i] for j in alive)
        }
        if new == alive:
            return sorted(alive)
        alive = new


def find_graph_diamond(A: IntMatrix, labeling: Sequence[int]):
    """Two distinct equal-label paths with common ends, or ``None``.

    Works on the ordered-pair graph of distinct equally labelled states.
    Returns a pair of state paths when a diamond exists.
    """
    alive = _trim_matrix(A)
    aset = set(alive)
    succ = {i: [j for j in alive if A[i, j]] for i in alive}
    parent: dict[tuple[int, int], tuple | None] = {}
    todo = deque()
    for s in alive:
        outs = succ[s]
        for u, v in itertools.permutations(outs, 2):
            if labeling[u] == labeling[v] and (u, v) not in parent:
                parent[(u, v)] = ("start", s)
                todo.append((u, v))
    while todo:
        u, v = todo.popleft()
        common = set(succ[u]) & set(succ[v])
        if common:
            w = min(common)
            path = [(u, v)]
            node = (u, v)
            while True:
                prev = parent[node]
                if prev[0] == "start":
                    s = prev[1]
                    break
                node = prev
                path.append(node)
            path.reverse()
            left = [s] + [a for a, _ in path] + [w]
            right = [s] + [b for _, b in path] + [w]
            return left, right
        for u2 in succ[u]:
            for v2 in succ[v]:
                if u2 != v2 and labeling[u2] == labeling[v2] and (u2, v2) not in parent and u2 in aset:
                    parent[(u2, v2)] = (u, v)
                    todo.append((u2, v2))
    return None


def check_properties(A: IntMatrix, J: IntMatrix, labeling: Sequence[int], tau: Sequence[int], r: int) -> dict:
    """Certificate for (P1) reversal identities, (P2) label equivariance, (P3) no diamonds."""
    cert: dict = {}
    try:
        validate(A, J, r)
        cert["P1"] = {"pass": True}
    except ValidationError as exc:
        cert["P1"] = {"pass": False, "reason": str(exc), "witness": exc.cell}
    bad = None
    if J.is_zero_one():
        for i in range(J.n):
            row = [j for j in range(J.n) if J[i, j]]
            if len(row) == 1 and labeling[row[0]] != tau[labeling[i]]:
                bad = i
                break
    cert["P2"] = {"pass": bad is None} if bad is None else {
        "pass": False,
        "witness": bad,
        "reason": f"label of J-image of state {bad} is not tau of its label",
    }
    diamond = find_graph_diamond(A, labeling)
    cert["P3"] = {"pass": True} if diamond is None else {
        "pass": False,
        "witness": [list(diamond[0]), list(diamond[1])],
    }
    cert["pass"] = all(cert[k]["pass"] for k in ("P1", "P2", "P3"))
    return cert


# --------------------------------------------------------------------------
# signed subset matrices and counts


def _inversions(seq: Sequence[int]) -> int:
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def _bijection_sign(S1: Sequence[int], S2: Sequence[int], f: Mapping[int, int]) -> int:
    pos = {b: i for i, b in enumerate(S2)}
    return -1 if _inversions([pos[f[a]] for a in S1]) % 2 else 1


@dataclass(frozen=True)
class SignedSubsetMatrices:
    """``A_k`` and ``J_k`` over ``k``-subsets of equally labelled chain states.

    Signs use the chain's state order. With ``essential_only`` the index
    set keeps only subsets on bi-infinite paths of the support graph; all
    traces and entry-sum counts are unchanged by this.
    """

    k: int
    index_set: tuple[tuple[int, ...], ...]
    A_k: IntMatrix
    J_k: IntMatrix
    order: tuple[int, ...]
    essential_only: bool = True

    def power(self, m: int) -> IntMatrix:
        """``A_k^m``, memoised since counts sweep ``m`` upward."""
        cache = self.__dict__.setdefault("_powers", [IntMatrix.identity(self.A_k.n)])
        while len(cache) <= m:
            cache.append(cache[-1] @ self.A_k)
        return cache[m]

    def trace_with_j(self, m: int, e: int) -> int:
        """``tr(A_k^m J_k^e)`` using that ``J_k`` is a signed permutation."""
        n = self.A_k.n
        if n == 0:
            return 0
        J = self.J_k.rows
        step = [next(c for c in range(n) if J[i][c]) for i in range(n)]
        img = list(range(n))
        sign = [1] * n
        for _ in range(e):
            for i in range(n):
                sign[i] *= J[img[i]][step[img[i]]]
                img[i] = step[img[i]]
        # (J^e)[j, img[j]] = sign[j], so tr(M J^e) = sum_j M[img[j], j] sign[j]
        P = self.power(m).rows
        return sum(P[img[j]][j] * sign[j] for j in range(n))


def _images(S: tuple[int, ...], succ: Mapping[int, list[int]], labeling) -> dict[tuple[int, ...], int]:
    """Targets ``T`` of bijections ``S -> T`` along edges, with signed counts."""
    out: dict[tuple[int, ...], int] = {}
    k = len(S)
    choice: list[int] = []

    def rec(i, used):
        if i == k:
            lab = {labeling[t] for t in choice}
            if len(lab) == 1:
                T = tuple(sorted(choice))
                f = dict(zip(S, choice))
                out[T] = out.get(T, 0) + _bijection_sign(S, T, f)
            return
        for t in succ[S[i]]:
            if t in used:
                continue
            if choice and labeling[t] != labeling[choice[0]]:
                continue
            choice.append(t)
            used.add(t)
            rec(i + 1, used)
            used.discard(t)
            choice.pop()

    rec(0, set())
    return out


def _unpack(chain):
    if isinstance(chain, JointStateChain):
        return chain.system.A, chain.system.J, chain.labeling
    return chain


def _prune(nodes, edges) -> set:
    """Nodes on bi-infinite paths of the subset graph."""
    keep = set(nodes)
    while True:
        has_in = {T for S in keep for T in edges[S] if T in keep}
        new = {S for S in keep if S in has_in and any(T in keep for T in edges[S])}
        if new == keep:
            return keep
        keep = new


MAX_SUBSET_INDEX = 3000


def _assemble(k, nodes, edges, keep, tau, n, essential_only) -> SignedSubsetMatrices:
    index = tuple(S for S in nodes if S in keep)
    pos = {S: i for i, S in enumerate(index)}
    N = len(index)
    if N > MAX_SUBSET_INDEX:
        raise BudgetExceeded(f"A_{k} would have {N} rows, above the limit of {MAX_SUBSET_INDEX}")
    Ak = [[0] * N for _ in range(N)]
    Jk = [[0] * N for _ in range(N)]
    for S in index:
        for T, val in edges[S].items():
            if T in pos:
                Ak[pos[S]][pos[T]] = val
        img = tuple(sorted(tau[a] for a in S))
        if img not in pos:
            raise ChainPropertyError(f"J does not map subset {S} into the index set")
        Jk[pos[S]][pos[img]] = _bijection_sign(S, img, {a: tau[a] for a in S})
    return SignedSubsetMatrices(k, index, IntMatrix.of(Ak), IntMatrix.of(Jk), tuple(range(n)), essential_only)


def _essential_levels(A: IntMatrix, J: IntMatrix, labeling, kmax: int, budget: int):
    """Yield ``SignedSubsetMatrices`` for ``k = 1, 2, ...`` on essential subsets.

    A subset on a cycle of the ``k``-subset graph has all its
    ``(k-1)``-subsets on cycles of the ``(k-1)``-subset graph (follow a
    pair of elements around the cycle until the permutation returns), so
    level ``k`` candidates are built only from essential level ``k-1``
    subsets. Stops after the first empty level.
    """
    n = A.n
    tau = [next(j for j in range(n) if J[i, j]) for i in range(n)]
    succ = {i: [j for j in range(n) if A[i, j]] for i in range(n)}
    prev = None
    for k in range(1, kmax + 1):
        if k == 1:
            nodes = [(i,) for i in range(n)]
        else:
            nodes = []
            for S in sorted(prev):
                for b in range(S[-1] + 1, n):
                    if labeling[b] != labeling[S[0]]:
                        continue
                    T = S + (b,)
                    if all(T[:i] + T[i + 1 :] in prev for i in range(k - 1)):
                        nodes.append(T)
                        if len(nodes) > budget:
                            raise BudgetExceeded(f"more than {budget} candidate subsets of size {k}")
        edges = {S: _images(S, succ, labeling) for S in nodes}
        keep = _prune(nodes, edges)
        yield _assemble(k, nodes, edges, keep, tau, n, True)
        if not keep:
            return
        prev = keep


def build_signed_matrices(
    chain: JointStateChain | tuple, k: int, essential_only: bool = True, budget: int | None = None
) -> SignedSubsetMatrices:
    """Signed ``A_k``, ``J_k``. ``chain`` may also be ``(A, J, labeling)``.

    With ``essential_only=False`` the index set is every ``k``-subset of
    equally labelled states.
    """
    A, J, labeling = _unpack(chain)
    n = A.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    budget = default_budget() if budget is None else budget
    if essential_only:
        last = None
        for last in _essential_levels(A, J, labeling, k, budget):
            pass
        if last.k == k:
            return last
        return SignedSubsetMatrices(k, (), IntMatrix(()), IntMatrix(()), tuple(range(n)), True)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(labeling[i], []).append(i)
    total = sum(math.comb(len(g), k) for g in groups.values())
    if total > budget:
        raise BudgetExceeded(f"{total} subsets of size {k} exceed the budget of {budget}")
    nodes = [S for lab in sorted(groups) for S in itertools.combinations(groups[lab], k)]
    tau = [next(j for j in range(n) if J[i, j]) for i in range(n)]
    succ = {i: [j for j in range(n) if A[i, j]] for i in range(n)}
    edges = {S: _images(S, succ, labeling) for S in nodes}
    return _assemble(k, nodes, edges, set(nodes), tau, n, False)


def signed_matrix_family(chain: JointStateChain, budget: int | None = None) -> list[SignedSubsetMatrices]:
    """Nonempty ``A_k, J_k`` for ``k = 1, 2, ...``, cached on the chain.

    Levels past the first empty one are empty as well and are omitted.
    """
    cached = getattr(chain, "_signed_cache", None)
    if cached is not None:
        return cached
    A, J, labeling = _unpack(chain)
    budget = default_budget() if budget is None else budget
    sizes: dict[int, int] = {}
    for lab in labeling:
        sizes[lab] = sizes.get(lab, 0) + 1
    fam = [s for s in _essential_levels(A, J, labeling, max(sizes.values()), budget) if s.A_k.n]
    object.__setattr__(chain, "_signed_cache", fam)
    return fam


def fixed_count_theoremC(chain: JointStateChain, m: int, l: int, budget: int | None = None) -> int:
    """``sum_k (-1)^(k+1) tr(A_k^m J_k^2l)``: points of ``X`` fixed by ``sigma^m phi^2l``."""
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 <= l < chain.r:
        raise ValueError(f"l must lie in 0..{chain.r - 1}")
    fam = signed_matrix_family(chain, budget)
    terms = [s.trace_with_j(m, 2 * l) for s in fam]
    total = sum((-1) ** (s.k + 1) * t for s, t in zip(fam, terms))
    if total < 0:
        raise InclusionExclusionViolated(
            f"inclusion-exclusion violated: m={m}, l={l}, terms={terms}, total={total}"
        )
    return total


def theoremC_terms(chain: JointStateChain, m: int, l: int) -> list[int]:
    return [s.trace_with_j(m, 2 * l) for s in signed_matrix_family(chain)]


def sofic_fixed_count_bruteforce(p: LabeledPresentation, m: int, l: int, budget: int | None = None) -> int:
    """Count label words ``w`` of length ``m`` whose forced periodic extension lies in ``X``."""
    if m < 1:
        raise ValueError("m must be positive")
    period = m * order_of_b_power(2 * l, p.r)
    return count_sofic_conditions(p, [(m, 2 * l)], period, budget)


def count_sofic_conditions(p: LabeledPresentation, conditions, period: int, budget: int | None = None) -> int:
    """Points of ``X`` with period dividing ``period`` meeting every ``(n, e)`` condition."""
    walker = RelationWalker(p.succ(), p.n_states)
    return count_fixed_configurations(p.n_labels, period, conditions, p.tau, walker, budget)


# --------------------------------------------------------------------------
# subsystems and flips


def label_fixed_subpresentation(p: LabeledPresentation, k: int) -> LabeledPresentation | None:
    """Presentation of ``X_2k``: points whose labels are all fixed by ``tau^2k``.

    The order is the smallest ``r'`` with ``tau^2r' = id`` on the kept
    labels. ``None`` when ``X_2k`` is empty.
    """
    t = perm_power(p.tau, 2 * k)
    keep = [a for a in range(p.n_labels) if t[a] == a]
    q = p.restrict_labels(keep, p.tau, 1)
    q = LabeledPresentation(q.states, q.labels, q.edges, q.tau, true_half_order(q.tau))
    try:
        return trim_essential(q)
    except EmptyShift:
        return None


def flip_subpresentation(p: LabeledPresentation, d: int) -> LabeledPresentation | None:
    """``X_2d`` with the flip ``phi^d`` (``d`` odd), as an order-2 presentation."""
    if d < 1 or d % 2 == 0:
        raise ValueError("flip power must be odd and positive")
    t = perm_power(p.tau, 2 * d)
    keep = [a for a in range(p.n_labels) if t[a] == a]
    q = p.restrict_labels(keep, perm_power(p.tau, d), 1)
    try:
        return trim_essential(q)
    except EmptyShift:
        return None


def flip_counts_sofic(chain: JointStateChain, m: int, budget: int | None = None) -> tuple[int, int, int]:
    """``(p(2m-1,0), p(2m,0), p(2m,1))`` from alternating entry sums over ``k``."""
    if chain.r != 1:
        raise ValueError("flip counts need an order-2 chain")
    if m < 1:
        raise ValueError("m must be positive")
    totals = [0, 0, 0]
    for s in signed_matrix_family(chain, budget):
        sign = 1 if s.k % 2 else -1
        A, J = s.A_k, s.J_k
        Am1 = A ** (m - 1)
        Jd, AJd, JAd = diag(J), diag(A @ J), diag(J @ A)
        totals[0] += sign * entry_sum(Jd @ Am1 @ AJd)
        totals[1] += sign * entry_sum(Jd @ Am1 @ A @ Jd)
        totals[2] += sign * entry_sum(JAd @ Am1 @ AJd)
    if min(totals) < 0:
        raise InclusionExclusionViolated(f"inclusion-exclusion violated: m={m}, totals={totals}")
    return tuple(totals)


def sofic_flip_count_bruteforce(p: LabeledPresentation, m: int, n: int, budget: int | None = None) -> int:
    """``p(m, n)`` for an order-2 presentation."""
    return count_sofic_conditions(p, [(m, 0), (n, 1)], m, budget)


def sofic_flip_counts_bruteforce(p: LabeledPresentation, m: int, budget: int | None = None) -> tuple[int, int, int]:
    return (
        sofic_flip_count_bruteforce(p, 2 * m - 1, 0, budget),
        sofic_flip_count_bruteforce(p, 2 * m, 0, budget),
        sofic_flip_count_bruteforce(p, 2 * m, 1, budget),
    )


# --------------------------------------------------------------------------
# fixtures and generators


def presentation_from_sft(sys: ReversalSFT) -> LabeledPresentation:
    """Vertex shift as a presentation: edge ``a -> b`` labelled ``b``."""
    edges = tuple(
        (a, b, b) for a in range(sys.size) for b in range(sys.size) if sys.A[a, b]
    )
    return LabeledPresentation(sys.alphabet, sys.alphabet, edges, sys.tau, sys.r)


def even_shift(tau: Sequence[int] = (0, 1), r: int = 1) -> LabeledPresentation:
    """Even shift: runs of ``1`` between ``0``s have even length."""
    return LabeledPresentation(("p", "q"), ("0", "1"), ((0, 0, 0), (0, 1, 1), (1, 0, 1)), tuple(tau), r)


def golden_mean_presentation(tau: Sequence[int] = (0, 1), r: int = 1) -> LabeledPresentation:
    return LabeledPresentation(("q0", "q1"), ("0", "1"), ((0, 0, 0), (0, 1, 1), (1, 0, 0)), tuple(tau), r)


def full_shift_presentation(n: int, tau: Sequence[int] | None = None, r: int = 1) -> LabeledPresentation:
    tau = tuple(range(n)) if tau is None else tuple(tau)
    return LabeledPresentation(("s",), tuple(str(a) for a in range(n)), tuple((0, 0, a) for a in range(n)), tau, r)


def random_closed_presentation(rng, n_states: int, n_labels: int, r: int, density: float = 0.35):
    """Random presentation closed under the reversal by construction.

    A state permutation ``pi`` and label permutation ``tau`` with orders
    dividing ``2r`` are drawn; edges are closed under
    ``(p, q, a) -> (pi(q), pi(p), tau(a))`` so ``pi`` is an isomorphism
    from the graph to its tau-relabelled reversal. Returns ``None`` if the
    trimmed graph is empty.
    """
    pi = random_symbol_map(rng, n_states, r)
    tau = random_symbol_map(rng, n_labels, r)
    edges = set()
    for p in range(n_states):
        for q in range(n_states):
            for a in range(n_labels):
                if rng.random() < density:
                    edges.add((p, q, a))
    todo = list(edges)
    while todo:
        p, q, a = todo.pop()
        e = (pi[q], pi[p], tau[a])
        if e not in edges:
            edges.add(e)
            todo.append(e)
    pres = LabeledPresentation(
        tuple(f"s{i}" for i in range(n_states)),
        tuple(chr(ord("a") + i) for i in range(n_labels)),
        tuple(sorted(edges)),
        tau,
        r,
    )
    try:
        return trim_essential(pres)
    except EmptyShift:
        return None
