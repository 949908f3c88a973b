"""Certified local-lemma parameters for forbidden-word avoidance.

Bad events are "the window ``v`` of length ``l`` holds a forbidden word",
with ``Pr[A_v] <= 2**(-(1 - alpha) l)``.  Each event gets weight
``p_v = 2**(-delta l)`` and the product over intersecting windows is bounded
below by ``D**l``.  A plan is usable when

    2**(-delta l) * D**l >= 2**(-(1 - alpha) l)      for all l >= L.

In ``d`` dimensions ``l`` is replaced by the cube volume ``l**d``.

All lower bounds are computed with ``FRAC_BITS``-bit precision (binary
fixed point, or a floating binary exponent inside long products), rounding
every operation toward zero, so a returned constant is never larger than
the true infinite product.  Powers ``2**(-e)`` with rational
``e`` come from exact integer roots rounded up.  The product over
``k > K`` is bounded with ``log(1 - x) >= -2x`` (valid for ``x <= 1/2``)
and a geometric majorant of the remaining series, then
``exp(-y) >= 1 - y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import gmpy2

from .family import as_alpha

__all__ = [
    "FRAC_BITS",
    "GAMMA_DENOM",
    "DEFAULT_L_CEILING",
    "PlanSearchError",
    "LllPlan",
    "GridLllPlan",
    "certified_product",
    "certify",
    "make_plan",
    "make_grid_plan",
    "check_condition",
    "plan_text",
    "parse_plan",
]

FRAC_BITS = 160
ONE = 1 << FRAC_BITS
GAMMA_DENOM = 4096
DEFAULT_L_CEILING = 2**20
TAIL_TARGET = Fraction(1, 2**64)


class PlanSearchError(RuntimeError):
    """No admissible L below the search ceiling."""


# -- fixed-point primitives -------------------------------------------------

@lru_cache(maxsize=None)
def _two_pow_frac_up(r: int, b: int) -> int:
    # ceil(ONE * 2**(-r/b)), 0 <= r < b
    target = gmpy2.mpz(1) << (FRAC_BITS * b - r)
    root, exact = gmpy2.iroot(target, b)
    return int(root) if exact else int(root) + 1


def _two_pow_neg_up(e: Fraction) -> int:
    """Fixed-point upper bound on ``2**(-e)`` for rational ``e >= 0``."""
    q, r = divmod(e.numerator, e.denominator)
    w = _two_pow_frac_up(r, e.denominator)
    return -((-w) >> q)


def _fx_mul(a: int, b: int) -> int:
    return (a * b) >> FRAC_BITS


def _fx_pow(f: int, m: int) -> int:
    result, base = ONE, f
    while m:
        if m & 1:
            result = _fx_mul(result, base)
        m >>= 1
        if m:
            base = _fx_mul(base, base)
    return result


def _fx_root(v: int, m: int) -> int:
    if m == 1:
        return v
    root, _ = gmpy2.iroot(gmpy2.mpz(v) << (FRAC_BITS * (m - 1)), m)
    return int(root)


# products are carried as (m, e) meaning m / 2**e, floored to FRAC_BITS + 1
# significant bits, so tiny values keep their relative precision

def _fl_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    m, e = a[0] * b[0], a[1] + b[1]
    extra = m.bit_length() - FRAC_BITS - 1
    if extra > 0:
        m >>= extra
        e -= extra
    return m, e


def _fl_pow(f: tuple[int, int], k: int) -> tuple[int, int]:
    result, base = (1, 0), f
    while k:
        if k & 1:
            result = _fl_mul(result, base)
        k >>= 1
        if k:
            base = _fl_mul(base, base)
    return result


def _fl_to_fx(v: tuple[int, int]) -> int:
    m, e = v
    return m >> (e - FRAC_BITS) if e >= FRAC_BITS else m << (FRAC_BITS - e)


def _fx_floor(x: Fraction) -> int:
    return (x.numerator * ONE) // x.denominator


# -- certified infinite products -------------------------------------------

def _tail_sum_upper(delta: Fraction, K: int, j: int, d: int) -> Fraction | None:
    """Upper bound on ``sum_{k>K} k**j * 2**(-delta k**d)``; None if the majorant diverges."""
    step = Fraction(_two_pow_neg_up(delta * ((K + 2) ** d - (K + 1) ** d)), ONE)
    ratio = Fraction(K + 2, K + 1) ** j * step
    if ratio >= 1:
        return None
    first = (K + 1) ** j * Fraction(_two_pow_neg_up(delta * (K + 1) ** d), ONE)
    return first / (1 - ratio)


@lru_cache(maxsize=None)
def _tail_cut(delta: Fraction, j: int, d: int) -> int:
    K = 8
    while True:
        t = _tail_sum_upper(delta, K, j, d)
        if t is not None and t <= TAIL_TARGET:
            return K
        K *= 2


def _check_product_args(delta: Fraction, L: int, j: int, d: int):
    if delta <= 0:
        raise ValueError("delta must be positive")
    if L < 1 or j < 0 or d < 1:
        raise ValueError("need L >= 1, j >= 0, d >= 1")
    if delta * L**d <= 1:
        raise ValueError(
            f"2**(-delta*L**d) must be < 1/2 (delta={delta}, L={L}, d={d})"
        )


def _product_fl(delta: Fraction, L: int, j: int, d: int) -> tuple[int, int]:
    K = max(_tail_cut(delta, j, d), L)
    tail = _tail_sum_upper(delta, K, j, d)
    acc = (max(_fx_floor(1 - 2 * tail), 0), FRAC_BITS)
    for k in range(K, L - 1, -1):
        f = (ONE - _two_pow_neg_up(delta * k**d), FRAC_BITS)
        acc = _fl_mul(acc, _fl_pow(f, k**j))
    return acc


def certified_product(delta, L: int, j: int = 0, d: int = 1) -> Fraction:
    """Lower bound on ``prod_{k>=L} (1 - 2**(-delta k**d)) ** (k**j)``.

    The result is a dyadic rational in ``(0, 1]`` that never exceeds the
    true product and is nondecreasing in ``L``.  Requires
    ``2**(-delta L**d) < 1/2``.
    """
    delta = Fraction(delta)
    _check_product_args(delta, L, j, d)
    m, e = _product_fl(delta, L, j, d)
    return Fraction(m, 1 << e)


# -- plans -------------------------------------------------------------------

@dataclass(frozen=True)
class LllPlan:
    alpha: Fraction
    delta: Fraction
    L: int
    d_lower: Fraction
    gamma: Fraction
    margin: Fraction
    dim: int = 1

    def is_valid(self) -> bool:
        half = (1 - self.alpha) / 2
        return (
            0 < self.delta < half
            and 0 <= self.gamma < half
            and 0 < self.d_lower <= 1
            and self.margin == (1 - self.alpha) - self.delta - self.gamma
            and self.margin > 0
            and _gamma_for(self.d_lower) <= self.gamma
            and check_condition(self, self.L)
        )


@dataclass(frozen=True)
class GridLllPlan(LllPlan):
    monomial_constants: tuple = field(default=())
    coefficients: tuple = field(default=())


def _gamma_for(d_lower: Fraction) -> Fraction:
    """Smallest multiple of ``1/GAMMA_DENOM`` that is ``>= -log2(d_lower)``."""
    # find least m with d_lower**G * 2**m >= 1, exactly
    if d_lower <= 0:
        raise ValueError("d_lower must be positive")
    G = GAMMA_DENOM
    num, den = d_lower.numerator**G, d_lower.denominator**G
    m = max(den.bit_length() - num.bit_length() - 1, 0)
    while num << m < den:
        m += 1
    while m > 0 and num << (m - 1) >= den:
        m -= 1
    return Fraction(m, G)


def _combined_fx(delta: Fraction, L: int, d: int) -> tuple[int, list[int]]:
    monomials = []
    total = ONE
    for i in range(d + 1):
        j = d - i
        di = _fl_to_fx(_product_fl(delta, L, j, d))
        monomials.append(di)
        v = _fx_pow(di, comb(d, i))
        total = _fx_mul(total, _fx_root(v, L**j))
    return total, monomials


def certify(alpha, delta, L: int, d: int = 1) -> LllPlan:
    """Build the plan for a given ``delta`` and ``L`` without any search.

    The combined constant is
    ``D = prod_i D_i ** (C(d, i) / L**(d - i))`` where ``D_i`` carries weight
    ``k**(d - i)``; for ``l >= L`` this gives ``R >= D**(l**d)``.  The result
    may violate the plan invariants; use :meth:`LllPlan.is_valid`.
    """
    alpha = as_alpha(alpha)
    delta = Fraction(delta)
    _check_product_args(delta, L, 0, d)
    fx, monomials = _combined_fx(delta, L, d)
    if fx == 0:
        raise ValueError(f"certified constant underflows at L={L}; use a larger L")
    d_lower = Fraction(fx, ONE)
    gamma = _gamma_for(d_lower)
    margin = (1 - alpha) - delta - gamma
    if d == 1:
        return LllPlan(alpha, delta, L, d_lower, gamma, margin)
    return GridLllPlan(
        alpha, delta, L, d_lower, gamma, margin, d,
        tuple(Fraction(m, ONE) for m in monomials),
        tuple(comb(d, i) for i in range(d + 1)),
    )


def _min_admissible_L(delta: Fraction, d: int) -> int:
    L = 1
    while delta * L**d <= 1:
        L += 1
    return L


def _search(alpha: Fraction, d: int, ceiling: int) -> LllPlan:
    delta = (1 - alpha) / 4
    half = (1 - alpha) / 2
    seen: dict[int, LllPlan] = {}

    def ok(L):
        if L not in seen:
            try:
                seen[L] = certify(alpha, delta, L, d)
            except ValueError:
                seen[L] = None
        return seen[L] is not None and seen[L].gamma < half

    L0 = _min_admissible_L(delta, d)
    L, failed = L0, None
    while not ok(L):
        failed = L
        L *= 2
        if L > ceiling:
            raise PlanSearchError(
                f"no admissible L <= {ceiling} for alpha={alpha}, d={d}"
            )
    if failed is not None:
        lo, hi = failed, L
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        L = hi
    return seen[L]


def make_plan(alpha, ceiling: int = DEFAULT_L_CEILING) -> LllPlan:
    """Plan with ``delta = (1 - alpha)/4`` and the least ``L`` making ``gamma < (1 - alpha)/2``.

    ``L`` is found by doubling from the smallest admissible value and then
    bisecting.

    >>> make_plan("1/2").delta
    Fraction(1, 8)
    """
    return _search(as_alpha(alpha), 1, ceiling)


def make_grid_plan(alpha, d: int, ceiling: int = DEFAULT_L_CEILING) -> LllPlan:
    """Plan for ``d``-dimensional cubes; ``d == 1`` gives exactly :func:`make_plan`."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return _search(as_alpha(alpha), d, ceiling)


def check_condition(plan: LllPlan, l: int) -> bool:
    """Exact test of ``2**(-delta V) * D**V >= 2**(-(1 - alpha) V)`` with ``V = l**dim``.

    Dividing through by the common power ``V`` leaves
    ``D >= 2**(-(1 - alpha - delta))``, which is decided in integers as
    ``D**b * 2**a >= 1`` for ``(1 - alpha - delta) = a/b``.
    """
    if l < plan.L:
        raise ValueError(f"l={l} is below the plan's L={plan.L}")
    e = 1 - plan.alpha - plan.delta
    a, b = e.numerator, e.denominator
    num, den = plan.d_lower.numerator**b, plan.d_lower.denominator**b
    if a >= 0:
        return num << a >= den
    return num >= den << (-a)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def plan_text(plan: LllPlan) -> str:
    lines = [
        f"alpha={_frac(plan.alpha)}",
        f"dim={plan.dim}",
        f"delta={_frac(plan.delta)}",
        f"L={plan.L}",
        f"D_lower={_frac(plan.d_lower)}",
        f"gamma={_frac(plan.gamma)}",
        f"margin={_frac(plan.margin)}",
        f"D_lower_approx={float(plan.d_lower):.12f}",
        f"gamma_approx={float(plan.gamma):.12f}",
        f"margin_approx={float(plan.margin):.12f}",
    ]
    if isinstance(plan, GridLllPlan):
        for i, (c, m) in enumerate(zip(plan.coefficients, plan.monomial_constants)):
            lines.append(f"c_{i}={c}")
            lines.append(f"D_{i}={_frac(m)}")
    return "\n".join(lines) + "\n"


def parse_plan(text: str) -> LllPlan:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            k, _, v = line.partition("=")
            kv[k.strip()] = v.strip()
    dim = int(kv.get("dim", 1))
    base = dict(
        alpha=Fraction(kv["alpha"]),
        delta=Fraction(kv["delta"]),
        L=int(kv["L"]),
        d_lower=Fraction(kv["D_lower"]),
        gamma=Fraction(kv["gamma"]),
        margin=Fraction(kv["margin"]),
    )
    if dim == 1:
        return LllPlan(**base)
    return GridLllPlan(
        **base, dim=dim,
        monomial_constants=tuple(Fraction(kv[f"D_{i}"]) for i in range(dim + 1)),
        coefficients=tuple(int(kv[f"c_{i}"]) for i in range(dim + 1)),
    )
