"""Algebraic identities between the pair invariants, as scaled residuals.

Each identity ``lhs == rhs`` is reported as ``|lhs - rhs| / scale`` where
``scale`` is the total magnitude of the terms combined on either side.  Plain
``|lhs - rhs| / |lhs|`` is meaningless when both sides are themselves the
result of cancellation (nearly parallel or nearly trivial observables).
"""
from __future__ import annotations

import math
import sys
from typing import Dict

from .core import SIGN_PAIRS, PairContext
from .criteria import bs_margins

TINY = 1e-300


def _rel(lhs: float, rhs: float, scale: float) -> float:
    return abs(lhs - rhs) / max(scale, abs(lhs), abs(rhs), TINY)


def _mags(ctx: PairContext):
    """Cancellation-free magnitudes of ``a``, ``b`` and ``Delta`` (sums of squares)."""
    am = {mu: ctx.A[mu] ** 2 + ctx.m ** 2 for mu in ctx.A}
    bm = {nu: ctx.B[nu] ** 2 + ctx.n ** 2 for nu in ctx.B}
    dm = {tau: (ctx.mvec - ctx.nvec * tau).norm2() + (ctx.x - tau * ctx.y) ** 2 for tau in ctx.delta}
    return am, bm, dm


def f_ellipse(ctx: PairContext) -> float:
    worst = 0.0
    for bias, sharp, f2, cf2 in ((ctx.x, ctx.m, ctx.fx2, ctx.one_minus_fx2),
                                 (ctx.y, ctx.n, ctx.fy2, ctx.one_minus_fy2)):
        # a subnormal 1 - F^2 carries only absolute precision
        if f2 > 0 and cf2 >= sys.float_info.min:
            t1, t2 = bias * bias / f2, sharp * sharp / cf2
            worst = max(worst, _rel(t1 + t2, 1.0, t1 + t2 + 1.0))
    return worst


def d_split(ctx: PairContext) -> float:
    worst = 0.0
    for mu, nu in SIGN_PAIRS:
        dl = ctx.delta[-mu * nu]
        lhs = 2.0 * ctx.d[mu, nu]
        rhs = dl + ctx.a[mu] + ctx.b[nu]
        scale = 2.0 * (1 + abs(ctx.x) + abs(ctx.y) + abs(ctx.gamma)) + abs(dl) + abs(ctx.a[mu]) + abs(ctx.b[nu])
        worst = max(worst, _rel(lhs, rhs, scale))
    return worst


def intersection_r(ctx: PairContext) -> float:
    if ctx.parallel:
        return 0.0
    s2 = ctx.s * ctx.s
    am, bm, dm = _mags(ctx)
    worst = 0.0
    for mu, nu in SIGN_PAIRS:
        t1 = s2 * ctx.a[mu] * ctx.b[nu] * ctx.delta[mu * nu]
        t2 = s2 * s2 * ctx.D[mu, nu] ** 2
        t3 = s2 * ctx.R * (ctx.L[mu, nu].norm2() - s2)
        scale = s2 * am[mu] * bm[nu] * dm[mu * nu] + abs(t2) + abs(t3)
        worst = max(worst, _rel(t1, t2 + t3, scale))
    return worst


def s2R_product(ctx: PairContext) -> float:
    if ctx.parallel:
        return 0.0
    g2 = ctx.gamma ** 2
    rhs = (g2 - ctx.f_minus) * (ctx.f_plus - g2)
    s2 = ctx.s * ctx.s
    am, bm, _ = _mags(ctx)
    root_mag = math.sqrt(am[1] * am[-1] * bm[1] * bm[-1])
    terms = 1 + ctx.x ** 2 + ctx.y ** 2 + g2 + ctx.m ** 2 + ctx.n ** 2 + ctx.g.norm2()
    scale = max(s2 * terms, (g2 + abs(ctx.f_minus)) * (g2 + abs(ctx.f_minus) + root_mag))
    return _rel(ctx.s2R, rhs, scale)


def f_minus_rewrite(ctx: PairContext) -> float:
    a, b = ctx.a, ctx.b
    root = ctx.root_a * ctx.root_b
    alt = ((a[1] + 2 * ctx.x) * (b[1] + 2 * ctx.y) - root) / 2 + ctx.m ** 2 + ctx.n ** 2 - 1
    am, bm, _ = _mags(ctx)
    prod_mag = (am[1] + 2 * abs(ctx.x)) * (bm[1] + 2 * abs(ctx.y))
    root_mag = math.sqrt(am[1] * am[-1] * bm[1] * bm[-1])
    scale = (prod_mag + root_mag) / 2 + ctx.m ** 2 + ctx.n ** 2 + 1
    return _rel(ctx.f_minus, alt, scale)


def _bs_mixed_scale(ctx: PairContext) -> float:
    """Magnitude of the terms combined into the mixed BS inequality; they stay O(1) even when s is tiny."""
    s2 = ctx.s * ctx.s
    A, B, c = ctx.A, ctx.B, ctx.cdot
    u = A[1] * B[1] + abs(c)
    v = A[-1] * B[-1] + abs(c)
    lp, lm = ctx.L[1, 1].norm2(), ctx.L[-1, -1].norm2()
    _, _, dm = _mags(ctx)
    return 2 * u * v * (s2 + math.sqrt(lp * lm)) + u * u * (lm + s2) + v * v * (lp + s2) + 4 * dm[1] * s2


def bs_mixed_4s2R(ctx: PairContext) -> float:
    if ctx.parallel:
        return 0.0
    s2 = ctx.s * ctx.s
    lhs = bs_margins(ctx)["bs_mixed"]
    rhs = 4.0 * s2 * ctx.R
    return _rel(lhs, rhs, _bs_mixed_scale(ctx))


def bs_mixed_sign_agrees(ctx: PairContext, band: float = 1e-9, floor: float = 1e-12) -> bool:
    """The mixed BS inequality holds iff ``R >= 0``; checked away from
    ``|R| <= band`` and where the inequality rises above the rounding floor of its own terms."""
    if ctx.parallel or abs(ctx.R) <= band:
        return True
    lhs = bs_margins(ctx)["bs_mixed"]
    if abs(lhs) <= floor * _bs_mixed_scale(ctx):
        return True
    return (lhs >= 0) == (ctx.R >= 0)


IDENTITIES = {
    "f_ellipse": f_ellipse,
    "d_split": d_split,
    "intersection_r": intersection_r,
    "s2R_product": s2R_product,
    "f_minus_rewrite": f_minus_rewrite,
    "bs_mixed_4s2R": bs_mixed_4s2R,
}


def identity_residuals(ctx: PairContext) -> Dict[str, float]:
    return {name: fn(ctx) for name, fn in IDENTITIES.items()}
