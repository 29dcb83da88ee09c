"""Generating functions and zeta functions of reversal systems.

Counts come from a :class:`CountProvider`: matrix traces for SFTs,
signed subset matrices for sofic chains, or the brute-force oracle. The
Lind zeta function is assembled two ways: as a product over the
sub-reversal and sub-flip systems, and straight from its definition as a
sum over finite-index subgroups.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_algebra import (
    RationalFunction,
    TruncatedSeries,
    poly_mul,
    poly_trim,
    reciprocal_char_poly,
    series_exp,
    series_sqrt,
)
from .group_g2r import divisors, enumerate_subgroups, subgroup_fixed_spec
from .sft_reversal import (
    ReversalSFT,
    count_points_fixed_by,
    fixed_count_bruteforce,
    fixed_count_trace,
    flip_counts_bruteforce,
    flip_counts_trace,
    flip_view,
    restrict_fixed_subsystem,
)
from . import sofic_reversal as _sofic


# --------------------------------------------------------------------------
# count providers


class FlipProvider(ABC):
    """Source of ``(p(2m-1,0), p(2m,0), p(2m,1))`` for an order-2 system."""

    @abstractmethod
    def flip_counts(self, m: int) -> tuple[int, int, int]: ...


class CountProvider(ABC):
    """Source of ``f(m, 2l)`` for a system of order ``2r``."""

    name = "abstract"
    r: int

    @abstractmethod
    def fixed_count(self, m: int, l: int) -> int: ...

    @abstractmethod
    def subsystem(self, k: int) -> CountProvider | None:
        """``X_2k`` seen as a system of order ``2k``; ``None`` when empty."""

    @abstractmethod
    def flip(self, d: int) -> FlipProvider | None:
        """The sub-flip ``(X_2d, sigma, phi^d)`` for odd ``d``; ``None`` when empty."""

    def count_conditions(self, conditions, period: int) -> int:
        raise NotImplementedError(f"{self.name} cannot count points under arbitrary conditions")


class _Flip(FlipProvider):
    def __init__(self, fn):
        self._fn = fn

    def flip_counts(self, m):
        return self._fn(m)


class SFTTraceCounts(CountProvider):
    name = "sft-trace"

    def __init__(self, sys: ReversalSFT):
        self.sys = sys
        self.r = sys.r

    def fixed_count(self, m, l):
        return fixed_count_trace(self.sys, m, l)

    def _sub(self, k):
        sub = restrict_fixed_subsystem(self.sys, k)
        return None if sub.is_empty() else sub.with_order(k)

    def subsystem(self, k):
        sub = self._sub(k)
        return None if sub is None else type(self)(sub)

    def flip(self, d):
        fv = flip_view(self.sys, d)
        if fv.system.is_empty():
            return None
        return _Flip(lambda m: flip_counts_trace(fv, m))


class SFTBruteCounts(SFTTraceCounts):
    name = "sft-bruteforce"

    def __init__(self, sys: ReversalSFT, budget: int | None = None):
        super().__init__(sys)
        self.budget = budget

    def fixed_count(self, m, l):
        return fixed_count_bruteforce(self.sys, m, l, self.budget)

    def subsystem(self, k):
        sub = self._sub(k)
        return None if sub is None else SFTBruteCounts(sub, self.budget)

    def flip(self, d):
        fv = flip_view(self.sys, d)
        if fv.system.is_empty():
            return None
        return _Flip(lambda m: flip_counts_bruteforce(fv, m, self.budget))

    def count_conditions(self, conditions, period):
        return count_points_fixed_by(self.sys, conditions, period, self.budget)


class SoficChainCounts(CountProvider):
    """Counts of the sofic shift via the joint state chain and signed matrices."""

    name = "sofic-chain"

    def __init__(self, pres: _sofic.LabeledPresentation, budget: int | None = None):
        self.pres = pres
        self.r = pres.r
        self.budget = budget
        self._chain = None

    @property
    def chain(self) -> _sofic.JointStateChain:
        if self._chain is None:
            self._chain = _sofic.build_joint_state_chain(self.pres, self.budget)
        return self._chain

    def fixed_count(self, m, l):
        return _sofic.fixed_count_theoremC(self.chain, m, l, self.budget)

    def _sub(self, k):
        sub = _sofic.label_fixed_subpresentation(self.pres, k)
        if sub is None:
            return None
        return _sofic.LabeledPresentation(sub.states, sub.labels, sub.edges, sub.tau, k)

    def subsystem(self, k):
        sub = self._sub(k)
        return None if sub is None else type(self)(sub, self.budget)

    def flip(self, d):
        sub = _sofic.flip_subpresentation(self.pres, d)
        if sub is None:
            return None
        chain = _sofic.build_joint_state_chain(sub, self.budget)
        return _Flip(lambda m: _sofic.flip_counts_sofic(chain, m, self.budget))


class SoficBruteCounts(SoficChainCounts):
    name = "sofic-bruteforce"

    def fixed_count(self, m, l):
        return _sofic.sofic_fixed_count_bruteforce(self.pres, m, l, self.budget)

    def flip(self, d):
        sub = _sofic.flip_subpresentation(self.pres, d)
        if sub is None:
            return None
        return _Flip(lambda m: _sofic.sofic_flip_counts_bruteforce(sub, m, self.budget))

    def count_conditions(self, conditions, period):
        return _sofic.count_sofic_conditions(self.pres, conditions, period, self.budget)


def providers_for(system, budget: int | None = None) -> list[CountProvider]:
    """Every applicable backend, fast one first."""
    if isinstance(system, ReversalSFT):
        return [SFTTraceCounts(system), SFTBruteCounts(system, budget)]
    if isinstance(system, _sofic.LabeledPresentation):
        return [SoficChainCounts(system, budget), SoficBruteCounts(system, budget)]
    raise TypeError(f"no count backends for {type(system).__name__}")


def _as_provider(obj, brute: bool = False) -> CountProvider:
    if isinstance(obj, CountProvider):
        return obj
    return providers_for(obj)[1 if brute else 0]


# --------------------------------------------------------------------------
# generating functions


def generating_g(cp, N: int, convention: str = "log") -> TruncatedSeries:
    """``sum_m sum_{l<r} f(m, 2l) t^m``, divided by ``m`` in the log convention."""
    if convention not in ("log", "ordinary"):
        raise ValueError("convention must be 'log' or 'ordinary'")
    cp = _as_provider(cp)
    out = [Fraction(0)] * (N + 1)
    for m in range(1, N + 1):
        total = sum(cp.fixed_count(m, l) for l in range(cp.r))
        out[m] = Fraction(total, m) if convention == "log" else Fraction(total)
    return TruncatedSeries(tuple(out))


def generating_h(fp: FlipProvider | None, N: int) -> TruncatedSeries:
    """``sum p(2m-1,0) t^(2m-1) + (p(2m,0) + p(2m,1))/2 t^(2m)``."""
    out = [Fraction(0)] * (N + 1)
    if fp is None:
        return TruncatedSeries(tuple(out))
    for m in range(1, N // 2 + 2):
        odd, even0, even1 = fp.flip_counts(m)
        if 2 * m - 1 <= N:
            out[2 * m - 1] = Fraction(odd)
        if 2 * m <= N:
            out[2 * m] = Fraction(even0 + even1, 2)
    return TruncatedSeries(tuple(out))


def ordinary_gf_rational(sys: ReversalSFT, l: int) -> RationalFunction:
    """Closed form of ``sum_{m>=1} tr(A^m J^2l) t^m``.

    The denominator is ``det(I - tA)`` of degree at most ``n``; the
    numerator has degree at most ``n`` and is recovered from the first
    ``n`` counts.
    """
    if sys.is_empty():
        return RationalFunction((0,), (1,))
    n = sys.size
    q = reciprocal_char_poly(sys.A)
    counts = [0] + [fixed_count_trace(sys, m, l) for m in range(1, n + 1)]
    num = poly_mul(q, counts)[: n + 1]
    return RationalFunction(tuple(num), tuple(q))


# --------------------------------------------------------------------------
# zeta functions


@dataclass(frozen=True)
class ZetaFactor:
    """``exp(scale * s(t^power))`` with ``s`` a g- or h-series.

    When ``base`` is set, ``exp(s) = base`` as power series, so the factor
    equals ``base(t^power) ** exponent``.
    """

    kind: str
    subsystem: str
    power: int
    scale: Fraction
    log_series: TruncatedSeries
    base: RationalFunction | None = None
    exponent: Fraction | None = None

    def series(self, N: int) -> TruncatedSeries:
        s = self.log_series.truncate(N).substitute_power(self.power) * self.scale
        return series_exp(s)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "subsystem": self.subsystem,
            "substitute_power": self.power,
            "scale": f"{self.scale.numerator}/{self.scale.denominator}",
            "log_series": self.log_series.to_strings(),
        }
        if self.base is not None:
            out["closed_form"] = {"base": self.base.to_json(), "exponent": f"{self.exponent.numerator}/{self.exponent.denominator}"}
        return out


@dataclass(frozen=True)
class ZetaResult:
    series: TruncatedSeries
    provenance: str
    factors: tuple[ZetaFactor, ...] = ()
    closed_form: RationalFunction | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        out = {
            "provenance": self.provenance,
            "coefficients": self.series.to_strings(),
            "factors": [f.to_json() for f in self.factors],
        }
        if self.closed_form is not None:
            out["closed_form"] = self.closed_form.to_json()
        return out


def _log_counts(counts: Sequence[int], N: int) -> TruncatedSeries:
    return TruncatedSeries(tuple([Fraction(0)] + [Fraction(counts[m - 1], m) for m in range(1, N + 1)]))


def artin_mazur(system, N: int) -> ZetaResult:
    """Zeta function of the shift alone, with its rational closed form."""
    if isinstance(system, ReversalSFT):
        if system.is_empty():
            return ZetaResult(TruncatedSeries.one(N), "artin-mazur/sft", closed_form=RationalFunction((1,), (1,)))
        counts = [fixed_count_trace(system, m, 0) for m in range(1, N + 1)]
        closed = RationalFunction((1,), tuple(reciprocal_char_poly(system.A)))
        return ZetaResult(series_exp(_log_counts(counts, N)), "artin-mazur/sft", closed_form=closed)
    chain = system if isinstance(system, _sofic.JointStateChain) else _sofic.build_joint_state_chain(system)
    counts = [_sofic.fixed_count_theoremC(chain, m, 0) for m in range(1, N + 1)]
    num, den = [1], [1]
    for s in _sofic.signed_matrix_family(chain):
        q = reciprocal_char_poly(s.A_k)
        if s.k % 2:
            den = poly_mul(den, q)
        else:
            num = poly_mul(num, q)
    closed = RationalFunction(tuple(poly_trim(num)), tuple(poly_trim(den)))
    return ZetaResult(series_exp(_log_counts(counts, N)), "artin-mazur/sofic", closed_form=closed)


def _am_base(cp: CountProvider) -> RationalFunction | None:
    if isinstance(cp, SFTTraceCounts):
        return RationalFunction((1,), tuple(reciprocal_char_poly(cp.sys.A)))
    return None


def flip_zeta(system, N: int) -> ZetaResult:
    """``sqrt(zeta_sigma(t^2)) * exp(h(t))`` for a system of order 2."""
    cp = _as_provider(system)
    if cp.r != 1:
        raise ValueError("flip zeta needs an order-2 system")
    g = generating_g(cp, N // 2, "log")
    h = generating_h(cp.flip(1), N)
    zeta_t = series_exp(g.truncate(N))
    root = series_sqrt(zeta_t.substitute_power(2))
    base = _am_base(cp)
    factors = (
        ZetaFactor("g", "X_2", 2, Fraction(1, 2), g, base, Fraction(1, 2) if base else None),
        ZetaFactor("h", "X_2 flip", 1, Fraction(1), h),
    )
    return ZetaResult(root * series_exp(h), "flip-zeta", factors)


def lind_zeta_product(system, N: int) -> ZetaResult:
    """Product over ``k | r`` of ``exp(g_2k(t^2k)/2k)`` and over odd ``d | r``
    of ``exp(h_2d(t^d)/d)``."""
    cp = _as_provider(system)
    r = cp.r
    total = TruncatedSeries.zero(N)
    factors = []
    for k in divisors(r):
        sub = cp.subsystem(k)
        if sub is None or 2 * k > N:
            continue
        g = generating_g(sub, N // (2 * k), "log")
        base = _am_base(sub) if sub.r == 1 else None
        f = ZetaFactor("g", f"X_{2 * k}", 2 * k, Fraction(1, 2 * k), g, base, Fraction(1, 2 * k) if base else None)
        factors.append(f)
        total = total + g.truncate(N).substitute_power(2 * k) * f.scale
    for d in divisors(r):
        if d % 2 == 0 or d > N:
            continue
        fp = cp.flip(d)
        if fp is None:
            continue
        h = generating_h(fp, N // d)
        f = ZetaFactor("h", f"X_{2 * d} flip phi^{d}", d, Fraction(1, d), h)
        factors.append(f)
        total = total + h.truncate(N).substitute_power(d) * f.scale
    return ZetaResult(series_exp(total), f"lind-product/{cp.name}", tuple(factors))


def lind_zeta_direct(system, N: int) -> ZetaResult:
    """``exp(sum_H f(H)/[G:H] t^[G:H])`` over subgroups of index at most ``N``.

    ``f(H)`` is always evaluated by brute force.
    """
    cp = _as_provider(system, brute=True)
    out = [Fraction(0)] * (N + 1)
    n_groups = 0
    for desc, idx in enumerate_subgroups(cp.r, N):
        spec = subgroup_fixed_spec(desc)
        f = cp.count_conditions(spec.conditions, spec.period)
        out[idx] += Fraction(f, idx)
        n_groups += 1
    series = series_exp(TruncatedSeries(tuple(out)))
    return ZetaResult(series, f"lind-direct/{cp.name}", meta={"subgroups": n_groups})
