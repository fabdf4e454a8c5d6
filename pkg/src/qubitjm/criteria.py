"""Closed-form joint-measurability criteria with signed margins.

Four criteria are implemented independently:

* ``thm1`` -- the single inequality in ``F_x``, ``F_y`` and ``gamma``;
* ``thm2`` -- the ``max(|alpha|, |beta|) >= 1`` test or the four-focus
  ellipse membership of ``g``, with the equivalent ``R >= 0`` form
  computed alongside;
* ``srh`` -- a three-case condition on ``F_x``, ``|gamma|`` and ``h_+-``;
* ``bs`` -- three quadratic inequalities: one per aligned sign pair and a
  mixed one that is equivalent to ``R >= 0``.

Each returns a :class:`Verdict` whose margin is positive for jointly
measurable pairs.  Disjunctive criteria report the largest disjunct margin.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict

from .core import PairContext, Vec3

DEFAULT_TOL = 1e-9


class Decision(str, enum.Enum):
    JOINTLY_MEASURABLE = "JointlyMeasurable"
    NOT_JOINTLY_MEASURABLE = "NotJointlyMeasurable"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class Verdict:
    criterion: str
    margin: float
    tol: float
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def decision(self) -> Decision:
        if abs(self.margin) <= self.tol:
            return Decision.BOUNDARY
        if self.margin > 0:
            return Decision.JOINTLY_MEASURABLE
        return Decision.NOT_JOINTLY_MEASURABLE

    @property
    def compatible(self) -> bool:
        """Sharp decision ``margin >= 0`` with no tolerance band."""
        return self.margin >= 0


def thm1_margin(ctx: PairContext) -> float:
    return ctx.gamma ** 2 - ctx.f_minus


def jm_thm1(ctx: PairContext, tol: float = DEFAULT_TOL) -> Verdict:
    return Verdict("thm1", thm1_margin(ctx), tol)


def four_focus_sum(ctx: PairContext, z: Vec3) -> float:
    """Sum of distances from ``z`` to the four points ``q_{mu nu}``."""
    return sum((z - q).norm() for q in ctx.q.values())


def jm_thm2(ctx: PairContext, tol: float = DEFAULT_TOL) -> Verdict:
    if ctx.parallel:
        return Verdict("thm2", math.inf, tol, {"parallel": 1.0})
    ab_margin = max(abs(ctx.alpha), abs(ctx.beta)) - 1.0
    # |m + n + nu g| + |m - n + nu g| summed over nu is the four-focus sum at g
    oval_margin = 4.0 - four_focus_sum(ctx, ctx.g)
    r_margin = ctx.R
    diag = {"ab_margin": ab_margin, "oval_margin": oval_margin, "R": r_margin,
            "r_form_margin": max(ab_margin, r_margin)}
    return Verdict("thm2", max(ab_margin, oval_margin), tol, diag)


def srh_c3_margin(ctx: PairContext) -> float:
    """Margin of ``sqrt(a+ h-) + sqrt(a- h+) >= 2s`` with ``h+-`` >= 0 required."""
    hp, hm = ctx.h_plus, ctx.h_minus
    if hp < 0 or hm < 0:
        return min(hp, hm)
    ap, am = max(ctx.a[1], 0.0), max(ctx.a[-1], 0.0)
    return math.sqrt(ap * hm) + math.sqrt(am * hp) - 2.0 * ctx.s


def jm_srh(ctx: PairContext, tol: float = DEFAULT_TOL) -> Verdict:
    c1 = ctx.fx - math.sqrt(1.0 - abs(ctx.y))
    # C2 and C3 carry the guard "not C1"; in a disjunction with C1 the guard is
    # redundant, and |gamma| < l is likewise redundant in C3 given C2.
    c2 = abs(ctx.gamma) - ctx.l
    c3 = srh_c3_margin(ctx)
    diag = {"c1": c1, "c2": c2, "c3": c3, "l_clamped": float(ctx.l_radicand < 0)}
    return Verdict("srh", max(c1, c2, c3), tol, diag)


def bs_margins(ctx: PairContext) -> Dict[str, float]:
    s2 = ctx.s * ctx.s
    A, B, a, b, c = ctx.A, ctx.B, ctx.a, ctx.b, ctx.cdot
    lpp, lmm = ctx.L[1, 1], ctx.L[-1, -1]
    lhs = 4.0 * ctx.delta[1] * s2
    u, v = A[1] * B[1] - c, A[-1] * B[-1] - c
    rhs_mixed = (2.0 * u * v * (s2 - lpp.dot(lmm))
             - u * u * (lmm.norm2() - s2) - v * v * (lpp.norm2() - s2))
    return {
        "bs_plus": a[1] * b[1] * (lmm.norm2() - s2) - lhs,
        "bs_minus": a[-1] * b[-1] * (lpp.norm2() - s2) - lhs,
        "bs_mixed": rhs_mixed - lhs,
    }


def jm_bs(ctx: PairContext, tol: float = DEFAULT_TOL) -> Verdict:
    diag = bs_margins(ctx)
    return Verdict("bs", max(diag.values()), tol, diag)


def unbiased_condition(m, n) -> float:
    """``1 + (m.n)^2 - m^2 - n^2``; non-negative iff an unbiased pair is compatible."""
    m, n = Vec3(*m), Vec3(*n)
    return 1.0 + m.dot(n) ** 2 - m.norm2() - n.norm2()


CRITERIA: Dict[str, Callable[[PairContext, float], Verdict]] = {
    "thm1": jm_thm1,
    "thm2": jm_thm2,
    "srh": jm_srh,
    "bs": jm_bs,
}


def all_verdicts(ctx: PairContext, tol: float = DEFAULT_TOL) -> Dict[str, Verdict]:
    return {name: fn(ctx, tol) for name, fn in CRITERIA.items()}
