"""Exact big-integer verification of the binomial-coefficient lemmas, the
diagonal binomial sum bound, and brute-force censuses of subset pairs and
meta-index 4-tuples compared against closed-form product counts.

Everything here is exact integer/rational arithmetic; the only place a real
constant enters is the rational upper bound on e used on the outermost
inequality of the elementary binomial bound chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

# Rational over-approximation of e = 2.71828182845904...; the chain's upper
# bound only gets weaker when e is replaced by something larger.
E_UPPER = Fraction(27182818285, 10_000_000_000)


class EnumerationBudgetError(RuntimeError):
    """The requested brute-force enumeration exceeds the configured budget."""


def binom(n: int, k: int) -> int:
    """Exact C(n, k); zero when k < 0 or k > n."""
    if k < 0 or k > n or n < 0:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    applicable: bool = True
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_lemma_bounds(n: int, d: int) -> CheckResult:
    """Chain (n/d)^d <= C(n,d) <= sum_k<=d C(n,k) <= (e n/d)^d, exact on the
    two inner quantities, with e replaced by a rational upper bound."""
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    c = binom(n, d)
    partial = sum(binom(n, k) for k in range(d + 1))
    left = Fraction(n, d) ** d
    right = (E_UPPER * n / d) ** d
    if left > c:
        return CheckResult(False, witness=f"(n/d)^d = {left} > C({n},{d}) = {c}")
    if c > partial:
        return CheckResult(False, witness=f"C({n},{d}) = {c} > partial sum {partial}")
    if partial > right:
        return CheckResult(
            False, witness=f"partial sum {partial} > (en/d)^d bound {float(right):g}"
        )
    return CheckResult(True)


def check_log_concavity(a: int, b: int, c: int) -> CheckResult:
    """C(a, b-c) C(a, b+c) <= C(a, b)^2, out-of-range coefficients read as 0."""
    lhs = binom(a, b - c) * binom(a, b + c)
    rhs = binom(a, b) ** 2
    if lhs > rhs:
        return CheckResult(False, witness=f"C({a},{b - c})C({a},{b + c})={lhs} > {rhs}")
    return CheckResult(True)


def check_decay(m: int, t: int, s: int) -> CheckResult:
    """C(m, t-s) <= (t/(m-t+1))^s C(m, t) for 1 <= s <= t <= m."""
    if not 1 <= s <= t <= m:
        raise ValueError("need 1 <= s <= t <= m")
    lhs = Fraction(binom(m, t - s))
    rhs = Fraction(t, m - t + 1) ** s * binom(m, t)
    if lhs > rhs:
        return CheckResult(False, witness=f"C({m},{t - s})={lhs} > {rhs}")
    return CheckResult(True)


def check_stability(m: int, p: int, t: int) -> CheckResult:
    """C(m+p, t) <= (1 + delta) C(m, t) with delta = 2tp/(m+1-t), provided
    delta <= 1/2; outside that regime the lemma does not apply."""
    if m < 1 or p < 1 or not 1 <= t <= m:
        raise ValueError("need positive integers with t <= m")
    delta = Fraction(2 * t * p, m + 1 - t)
    if delta > Fraction(1, 2):
        return CheckResult(True, applicable=False, witness="delta > 1/2")
    lhs = Fraction(binom(m + p, t))
    rhs = (1 + delta) * binom(m, t)
    if lhs > rhs:
        return CheckResult(False, witness=f"C({m + p},{t})={lhs} > {rhs}")
    return CheckResult(True)


def check_diag_sum(n: int, d: int, K: int) -> CheckResult:
    """The exact ingredients of the diagonal tensor sum bound:
    (a) C(d,v) K^v <= C(Kd,v) for all v <= d,
    (b) Vandermonde: sum_v C(Kd,v) C(n-d,d-v) = C(n-d+Kd,d),
    (c) sum_{v>=1} C(d,v) C(n-d,d-v) K^v <= C(n-d+Kd,d) - C(n-d,d).
    """
    if K < 1:
        raise ValueError("need integer K >= 1")
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    for v in range(d + 1):
        if binom(d, v) * K**v > binom(K * d, v):
            return CheckResult(
                False, witness=f"C({d},{v}) K^{v} > C({K * d},{v}) at v={v}"
            )
    vander_lhs = sum(binom(K * d, v) * binom(n - d, d - v) for v in range(d + 1))
    vander_rhs = binom(n - d + K * d, d)
    if vander_lhs != vander_rhs:
        return CheckResult(
            False, witness=f"Vandermonde: {vander_lhs} != {vander_rhs}"
        )
    weighted = sum(
        binom(d, v) * binom(n - d, d - v) * K**v for v in range(1, d + 1)
    )
    if weighted > vander_rhs - binom(n - d, d):
        return CheckResult(
            False,
            witness=f"weighted sum {weighted} > {vander_rhs - binom(n - d, d)}",
        )
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Brute-force censuses


def _subset_masks(n: int, d: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(n), d)]


def pair_overlap_census(n: int, d: int) -> dict[int, dict]:
    """Count ordered pairs (i, k) of d-subsets of [n] by overlap v = |i & k|
    and compare each cell against C(n,d) C(d,v) C(n-d,d-v)."""
    total_pairs = binom(n, d) ** 2
    if total_pairs > 10**7:
        raise EnumerationBudgetError(f"{total_pairs} pairs exceed the budget")
    masks = _subset_masks(n, d)
    counts: dict[int, int] = {}
    for a in masks:
        for b in masks:
            v = (a & b).bit_count()
            counts[v] = counts.get(v, 0) + 1
    out = {}
    for v in range(d + 1):
        enumerated = counts.get(v, 0)
        formula = binom(n, d) * binom(d, v) * binom(n - d, d - v)
        out[v] = {
            "enumerated": enumerated,
            "formula": formula,
            "match": enumerated == formula,
        }
    return out


def meta_index_formula(n: int, d: int, w: int, v: int, r: int) -> int:
    """Product count for 4-tuples in the (w, v, r) cell: choices for i, then
    j given i, then k given (i, j), then l given (i, j, k)."""
    return (
        binom(n, d)
        * binom(d, v)
        * binom(n - d, d - v)
        * binom(v, r)
        * binom(n - (2 * d - v), v - w)
        * binom(2 * (d - v), d - r - (v - w))
        * binom(d + w - r, 2 * w - r)
    )


@dataclass
class MetaIndexCensus:
    """Exact counts of double-covering 4-tuples of d-subsets by (w, v, r)."""

    n: int
    d: int
    cells: dict = field(default_factory=dict)

    def formula(self, w: int, v: int, r: int) -> int:
        return meta_index_formula(self.n, self.d, w, v, r)

    def all_match(self) -> bool:
        return all(
            cnt == self.formula(*cell) for cell, cnt in self.cells.items()
        )

    def rows(self) -> list[dict]:
        out = []
        for (w, v, r), cnt in sorted(self.cells.items()):
            f = self.formula(w, v, r)
            out.append(
                {
                    "w": w,
                    "v": v,
                    "r": r,
                    "enumerated": cnt,
                    "formula": f,
                    "match": cnt == f,
                }
            )
        return out


def meta_index_census(n: int, d: int) -> MetaIndexCensus:
    """Enumerate ordered 4-tuples (i, j, k, l) of d-subsets of [n], i != j,
    such that every element of the union is covered by at least two of the
    four sets, grouped by the defect w, the overlap v = |i & j| and the
    triple overlap r = |i & j & k|.

    Valid l's are generated directly as the d-sets sandwiched between the
    single-cover set of (i, j, k) and their union, which is exactly the
    double-cover condition. Tuples with l = k are counted: the per-cell
    product formula counts them too, and this is the aggregate consumed by
    the off-diagonal sum bound.

    Per-tuple structural identities are asserted on every enumerated tuple:
    w <= v <= d-1, r <= v, r <= 2w, r <= d-v+w, |s| = d-2w+r, and
    2w = |L3| + 2|L4| where L3/L4 are the triple/quadruple covered indices.
    """
    if binom(n, d) ** 3 > 10**8:
        raise EnumerationBudgetError(f"C({n},{d})^3 exceeds the budget")
    masks = _subset_masks(n, d)
    census = MetaIndexCensus(n=n, d=d)
    cells = census.cells
    for i in masks:
        for j in masks:
            if i == j:
                continue
            v = (i & j).bit_count()
            ij = i | j
            for k in masks:
                u = ij | k
                usize = u.bit_count()
                w = 2 * d - usize
                if w < 0:
                    continue
                r = (i & j & k).bit_count()
                # single-cover set of (i, j, k)
                s = (i ^ j ^ k) & ~(i & j & k)
                ssize = s.bit_count()
                if ssize > d:
                    continue
                free = u & ~s
                free_bits = [b for b in range(n) if free >> b & 1]
                need = d - ssize
                for extra in combinations(free_bits, need):
                    l = s | sum(1 << b for b in extra)
                    _assert_tuple_identities(n, d, i, j, k, l, w, v, r, ssize)
                    cell = (w, v, r)
                    cells[cell] = cells.get(cell, 0) + 1
    return census


def _assert_tuple_identities(n, d, i, j, k, l, w, v, r, ssize):
    if not (0 <= w <= v <= d - 1):
        raise AssertionError(f"w<=v<=d-1 violated: w={w} v={v} d={d}")
    if r > v or r > 2 * w or r > d - v + w:
        raise AssertionError(f"r constraints violated: w={w} v={v} r={r}")
    if ssize != d - 2 * w + r:
        raise AssertionError(f"|s|={ssize} != d-2w+r={d - 2 * w + r}")
    u = i | j | k | l
    l3 = l4 = 0
    for b in range(n):
        if not (u >> b & 1):
            continue
        cov = (i >> b & 1) + (j >> b & 1) + (k >> b & 1) + (l >> b & 1)
        if cov < 2:
            raise AssertionError("single-covered index slipped through")
        if cov == 3:
            l3 += 1
        elif cov == 4:
            l4 += 1
    if 2 * w != l3 + 2 * l4:
        raise AssertionError(f"2w={2 * w} != |L3|+2|L4|={l3 + 2 * l4}")
