"""Exact integer matrices, integer polynomials, truncated power series.

Nothing in here touches floating point. Matrices hold Python ints,
series hold :class:`fractions.Fraction` coefficients.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class ShapeError(ValueError):
    pass


class ConstantTermError(ValueError):
    pass


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense matrix of arbitrary-precision integers."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise ShapeError(f"ragged matrix, row lengths {sorted(widths)}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> IntMatrix:
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> IntMatrix:
        m = n if m is None else m
        return cls(tuple((0,) * m for _ in range(n)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> IntMatrix:
        """Matrix with ``M[i][perm[i]] = 1``."""
        n = len(perm)
        return cls(tuple(tuple(int(perm[i] == j) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        n = len(self.rows)
        return n, (len(self.rows[0]) if n else 0)

    @property
    def n(self) -> int:
        return len(self.rows)

    def is_square(self) -> bool:
        r, c = self.shape
        return r == c

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> list[int]:
        return [v for row in self.rows for v in row]

    @property
    def T(self) -> IntMatrix:
        if not self.rows:
            return self
        return IntMatrix(tuple(zip(*self.rows)))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        _same_shape(self, other)
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        _same_shape(self, other)
        return IntMatrix(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        brows = other.rows
        for row in self.rows:
            acc = [0] * m
            for kk, a in enumerate(row):
                if a:
                    b = brows[kk]
                    if a == 1:
                        acc = list(map(operator.add, acc, b))
                    else:
                        acc = [x + a * y for x, y in zip(acc, b)]
            out.append(tuple(acc))
        return IntMatrix(tuple(out))

    def __pow__(self, e: int) -> IntMatrix:
        if not self.is_square():
            raise ShapeError(f"power of non-square matrix {self.shape}")
        if e < 0:
            raise ValueError("negative matrix power")
        result = IntMatrix.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def trace(self) -> int:
        if not self.is_square():
            raise ShapeError(f"trace of non-square matrix {self.shape}")
        return sum(self.rows[i][i] for i in range(self.n))

    def restrict(self, index: Sequence[int]) -> IntMatrix:
        """Principal submatrix on the given row/column indices (in that order)."""
        return IntMatrix(tuple(tuple(self.rows[i][j] for j in index) for i in index))

    def is_zero_one(self) -> bool:
        return all(v in (0, 1) for row in self.rows for v in row)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()})"


def _same_shape(a: IntMatrix, b: IntMatrix) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")


def mat_pow_trace(A: IntMatrix, J: IntMatrix, m: int, e: int) -> int:
    """Exact ``tr(A^m J^e)``."""
    if not (A.is_square() and J.is_square()) or A.shape != J.shape:
        raise ShapeError(f"need square matrices of equal size, got A{A.shape} and J{J.shape}")
    if m < 0 or e < 0:
        raise ValueError("exponents must be non-negative")
    # tr(XY) = sum_ij X_ij Y_ji, avoids forming the product
    X = A ** m
    Y = J ** e
    n = A.n
    return sum(X.rows[i][j] * Y.rows[j][i] for i in range(n) for j in range(n))


def diag_and_entry_sum(M: IntMatrix) -> tuple[IntMatrix, int]:
    """Return the diagonal part of ``M`` and the sum of all its entries."""
    if not M.is_square():
        raise ShapeError(f"expected square matrix, got {M.shape}")
    n = M.n
    diag = IntMatrix(tuple(tuple(M.rows[i][j] if i == j else 0 for j in range(n)) for i in range(n)))
    return diag, entry_sum(M)


def diag(M: IntMatrix) -> IntMatrix:
    return diag_and_entry_sum(M)[0]


def entry_sum(M: IntMatrix) -> int:
    return sum(sum(r) for r in M.rows)


def bareiss_det(M: IntMatrix) -> int:
    """Fraction-free Gaussian elimination determinant."""
    if not M.is_square():
        raise ShapeError(f"determinant of non-square matrix {M.shape}")
    n = M.n
    if n == 0:
        return 1
    a = [list(r) for r in M.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------
# integer polynomials, stored as coefficient lists lowest degree first


def poly_trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_sub(p: Sequence, q: Sequence) -> list:
    return poly_add(p, [-c for c in q])


def poly_mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_divmod_q(p: Sequence, q: Sequence) -> tuple[list, list]:
    p = [Fraction(c) for c in poly_trim(p)]
    q = [Fraction(c) for c in poly_trim(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        c = p[-1] / q[-1]
        d = len(p) - len(q)
        quot[d] = c
        for i, b in enumerate(q):
            p[i + d] -= c * b
        p = poly_trim(p)
    return poly_trim(quot), p


def poly_gcd(p: Sequence, q: Sequence) -> list[int]:
    """Primitive integer gcd of two integer polynomials (Euclid over Q)."""
    a = poly_trim(p)
    b = poly_trim(q)
    while b:
        _, r = _poly_divmod_q(a, b)
        a, b = b, r
    if not a:
        return []
    return _primitive(a)


def _primitive(p: Sequence) -> list[int]:
    den = 1
    for c in p:
        c = Fraction(c)
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def poly_exact_div(p: Sequence[int], q: Sequence[int]) -> list[int]:
    quot, rem = _poly_divmod_q(p, q)
    if rem:
        raise ArithmeticError("polynomial division is not exact")
    if any(c.denominator != 1 for c in quot):
        raise ArithmeticError("quotient is not an integer polynomial")
    return [int(c) for c in quot]


def poly_to_str(p: Sequence, var: str = "t") -> str:
    terms = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c in (1, -1):
            coef = "" if c == 1 else "-"
        else:
            coef = str(c) + ("*" if mono else "")
        terms.append(f"{coef}{mono}")
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


def charpoly_berkowitz(A: IntMatrix) -> list[int]:
    """Coefficients of ``det(xI - A)``, highest degree first (division free)."""
    if not A.is_square():
        raise ShapeError(f"characteristic polynomial of non-square matrix {A.shape}")
    n = A.n
    if n == 0:
        return [1]
    a = A.rows
    coeffs = [1, -a[0][0]]
    # nonzero entries of the leading block, row by row; A_k matrices are sparse
    block: list[list[tuple[int, int]]] = [[]]
    for r in range(1, n):
        for i in range(r):
            if a[i][r - 1] and i < r - 1:
                block[i].append((r - 1, a[i][r - 1]))
        block[r - 1] = [(j, a[r - 1][j]) for j in range(r) if a[r - 1][j]]
        block.append([])
        # leading block M = a[:r][:r], column S = a[:r][r], row R = a[r][:r]
        S = [a[i][r] for i in range(r)]
        R = [(j, a[r][j]) for j in range(r) if a[r][j]]
        col = [1, -a[r][r]]
        v = S
        for _ in range(r):
            col.append(-sum(c * v[j] for j, c in R))
            v = [sum(c * v[j] for j, c in row) for row in block[:r]]
        # lower-triangular Toeplitz (r+2) x (r+1) times previous coefficients
        new = []
        for i in range(r + 2):
            new.append(sum(col[i - j] * coeffs[j] for j in range(min(i, r) + 1)))
        coeffs = new
    return coeffs


def reciprocal_char_poly(A: IntMatrix) -> list[int]:
    """``det(I - tA)`` as coefficients lowest degree first."""
    # det(I - tA) = t^n det(t^{-1} I - A), so the highest-first list reads lowest-first
    return poly_trim(charpoly_berkowitz(A)) or [1]


# --------------------------------------------------------------------------
# truncated series


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact series")
    return Fraction(x)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series ``c_0 + c_1 t + ... + c_N t^N`` with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(_frac(c) for c in self.coeffs))

    @classmethod
    def of(cls, coeffs: Iterable, order: int | None = None) -> TruncatedSeries:
        cs = [_frac(c) for c in coeffs]
        if order is not None:
            cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(cs))

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls((Fraction(0),) * (order + 1))

    @classmethod
    def one(cls, order: int) -> TruncatedSeries:
        return cls.of([1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _check(self, other: TruncatedSeries) -> None:
        if self.order != other.order:
            raise ValueError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        return TruncatedSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            c = _frac(other)
            return TruncatedSeries(tuple(c * a for a in self.coeffs))
        self._check(other)
        N = self.order
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (N + 1)
        for i in range(N + 1):
            if a[i]:
                for j in range(N + 1 - i):
                    out[i + j] += a[i] * b[j]
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def substitute_power(self, k: int) -> TruncatedSeries:
        """``s(t^k)`` truncated at the same order."""
        if k < 1:
            raise ValueError("substitution power must be positive")
        out = [Fraction(0)] * (self.order + 1)
        for i, c in enumerate(self.coeffs):
            if i * k > self.order:
                break
            out[i * k] = c
        return TruncatedSeries(tuple(out))

    def truncate(self, order: int) -> TruncatedSeries:
        return TruncatedSeries.of(self.coeffs, order)

    def to_strings(self) -> list[str]:
        return [fraction_to_str(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"TruncatedSeries([{', '.join(self.to_strings())}])"


def fraction_to_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    if s[0] != 0:
        raise ConstantTermError(f"exp needs c_0 = 0, got c_0 = {s[0]}")
    N = s.order
    f = s.coeffs
    g = [Fraction(1)] + [Fraction(0)] * N
    # g' = f' g
    for n in range(1, N + 1):
        g[n] = sum(k * f[k] * g[n - k] for k in range(1, n + 1)) / n
    return TruncatedSeries(tuple(g))


def series_log(s: TruncatedSeries) -> TruncatedSeries:
    if s[0] != 1:
        raise ConstantTermError(f"log needs c_0 = 1, got c_0 = {s[0]}")
    N = s.order
    a = s.coeffs
    f = [Fraction(0)] * (N + 1)
    # a' = f' a
    for n in range(1, N + 1):
        f[n] = a[n] - sum((k * f[k] * a[n - k] for k in range(1, n)), Fraction(0)) / n
    return TruncatedSeries(tuple(f))


def series_sqrt(s: TruncatedSeries) -> TruncatedSeries:
    if s[0] != 1:
        raise ConstantTermError(f"sqrt needs c_0 = 1, got c_0 = {s[0]}")
    N = s.order
    a = s.coeffs
    g = [Fraction(1)] + [Fraction(0)] * N
    for n in range(1, N + 1):
        g[n] = (a[n] - sum(g[k] * g[n - k] for k in range(1, n))) / 2
    return TruncatedSeries(tuple(g))


def series_pow(s: TruncatedSeries, e) -> TruncatedSeries:
    """``s^e`` for rational ``e``; ``s`` must have constant term 1."""
    e = _frac(e)
    if e.denominator == 1 and e >= 0:
        out = TruncatedSeries.one(s.order)
        for _ in range(int(e)):
            out = out * s
        return out
    return series_exp(series_log(s) * e)


def series_inverse(s: TruncatedSeries) -> TruncatedSeries:
    if s[0] == 0:
        raise ConstantTermError("inverse needs a nonzero constant term")
    N = s.order
    a = s.coeffs
    b = [Fraction(0)] * (N + 1)
    b[0] = 1 / a[0]
    for n in range(1, N + 1):
        b[n] = -sum(a[k] * b[n - k] for k in range(1, n + 1)) / a[0]
    return TruncatedSeries(tuple(b))


# --------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """Quotient of integer polynomials with ``denominator(0) != 0``.

    Construction normalises: common polynomial factors are cancelled, the
    integer content of the pair is removed and the denominator's constant
    term is made positive.
    """

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    def __post_init__(self):
        num = poly_trim([int(c) for c in self.numerator])
        den = poly_trim([int(c) for c in self.denominator])
        if not den or den[0] == 0:
            raise ConstantTermError("denominator must have a nonzero constant term")
        if num:
            g = poly_gcd(num, den)
            if len(g) > 1:
                num = poly_exact_div(num, g)
                den = poly_exact_div(den, g)
        content = 0
        for c in num + den:
            content = gcd(content, c)
        if content > 1:
            num = [c // content for c in num]
            den = [c // content for c in den]
        if den[0] < 0:
            num = [-c for c in num]
            den = [-c for c in den]
        object.__setattr__(self, "numerator", tuple(num))
        object.__setattr__(self, "denominator", tuple(den))

    def expand(self, order: int) -> TruncatedSeries:
        return expand_rational(self, order)

    def __str__(self) -> str:
        return f"({poly_to_str(self.numerator)}) / ({poly_to_str(self.denominator)})"

    def to_json(self) -> dict:
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}


def expand_rational(f: RationalFunction, order: int) -> TruncatedSeries:
    den = f.denominator
    if not den or den[0] == 0:
        raise ConstantTermError("denominator has zero constant term")
    num = list(f.numerator)
    d0 = Fraction(den[0])
    out = [Fraction(0)] * (order + 1)
    for n in range(order + 1):
        acc = Fraction(num[n]) if n < len(num) else Fraction(0)
        for k in range(1, min(n, len(den) - 1) + 1):
            acc -= den[k] * out[n - k]
        out[n] = acc / d0
    return TruncatedSeries(tuple(out))
