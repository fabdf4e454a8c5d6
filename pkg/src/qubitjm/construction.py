"""Explicit joint observables for compatible pairs, and their verification."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .core import (
    SIGN_PAIRS,
    SIGNS,
    ZERO,
    Effect,
    PairContext,
    SimpleObservable,
    Vec3,
    effect_of,
    pair_context,
    sgn,
)
from .criteria import thm1_margin

POSITIVITY_TOL = 1e-10
MARGINAL_TOL = 1e-12


class Incompatible(ValueError):
    """The pair admits no joint observable."""


class ConstructionFailed(RuntimeError):
    """A constructed candidate failed verification."""


class Case(str, enum.Enum):
    PRODUCT_S0 = "ProductS0"
    DEGENERATE_DELTA = "DegenerateDelta"
    THM3A = "ThmThreeA"
    THM3B = "ThmThreeB"
    EXPLICIT = "ExplicitZz"


@dataclass(frozen=True)
class JointObservable:
    effects: Dict[Tuple[int, int], Effect]
    case: Case
    Z: Optional[float] = None
    z: Optional[Vec3] = None
    info: Dict[str, float] = field(default_factory=dict)

    def __getitem__(self, key: Tuple[int, int]) -> Effect:
        return self.effects[key]


def assemble(Z: float, z: Vec3, obs_a: SimpleObservable, obs_b: SimpleObservable,
             case: Case = Case.EXPLICIT) -> JointObservable:
    """The general four-outcome family with the given marginals; not necessarily positive."""
    x, y, m, n = obs_a.x, obs_b.x, obs_a.m, obs_b.m
    effects = {}
    for mu, nu in SIGN_PAIRS:
        q = m * mu + n * nu
        effects[mu, nu] = Effect((1.0 + mu * x + nu * y + mu * nu * Z) / 4.0,
                                 (z * (mu * nu) + q) * 0.25)
    return JointObservable(effects, case, Z, z)


def z_cap(z: Vec3, ctx: PairContext) -> float:
    """Smallest ``Z`` meeting the two ``mu nu = +1`` positivity constraints at ``z``."""
    mn = ctx.mvec + ctx.nvec
    return max((z + mn * mu).norm() - mu * (ctx.x + ctx.y) for mu in SIGNS) - 1.0


def product_joint(obs_a: SimpleObservable, obs_b: SimpleObservable) -> JointObservable:
    """Hermitian part of ``O_mu(x, m) O_nu(y, n)``; equal to the product when m || n."""
    x, y, m, n = obs_a.x, obs_b.x, obs_a.m, obs_b.m
    cdot = m.dot(n)
    effects = {}
    for mu, nu in SIGN_PAIRS:
        c0 = ((1.0 + mu * x) * (1.0 + nu * y) + mu * nu * cdot) / 4.0
        c = (m * (mu * (1.0 + nu * y)) + n * (nu * (1.0 + mu * x))) * 0.25
        effects[mu, nu] = Effect(c0, c)
    return JointObservable(effects, Case.PRODUCT_S0)


def degenerate_joint(ctx: PairContext, tau: int) -> JointObservable:
    """Three-effect joint observable available when ``Delta_tau < 0``."""
    eta = sgn(ctx.x - tau * ctx.y)
    oa, ob = ctx.a_obs, ctx.b_obs
    zero = Effect(0.0, ZERO)
    effects = {
        (eta, eta * tau): effect_of(ob, eta * tau),
        (eta, -eta * tau): effect_of(oa, eta) - effect_of(ob, eta * tau),
        (-eta, -eta * tau): effect_of(oa, -eta),
        (-eta, eta * tau): zero,
    }
    return JointObservable(effects, Case.DEGENERATE_DELTA, info={"tau": tau, "eta": eta})


def thm3b_signs(ctx: PairContext) -> Tuple[int, int]:
    """``(eta, tau)`` selection; the ``|alpha| >= 1`` rule takes precedence."""
    if abs(ctx.alpha) >= 1.0:
        tau = sgn(ctx.alpha)
        eta = sgn(ctx.B[tau] * ctx.beta + tau * ctx.gamma - ctx.x)
    else:
        eta = sgn(ctx.beta)
        tau = sgn(ctx.A[eta] * ctx.alpha + eta * ctx.gamma - ctx.y)
    return eta, tau


def thm3b_point(ctx: PairContext, eta: int, tau: int) -> Vec3:
    """Midpoint of the two intersection points of ellipses ``E_x^eta`` and ``E_y^tau``."""
    L = ctx.L[eta, tau]
    denom = L.norm2() - ctx.s ** 2
    return ctx.g + ctx.svec.cross(L) * (ctx.D[eta, tau] / denom)


def construct_joint(obs_a: SimpleObservable, obs_b: SimpleObservable,
                    tol: float = 1e-9, ctx: Optional[PairContext] = None) -> JointObservable:
    ctx = ctx or pair_context(obs_a, obs_b)
    margin = thm1_margin(ctx)
    if margin < -tol:
        raise Incompatible(f"pair is not jointly measurable (margin {margin:.3g})")

    if ctx.parallel:
        joint = product_joint(obs_a, obs_b)
    elif ctx.delta_min < 0:
        tau = min(SIGNS, key=lambda t: ctx.delta[t])
        joint = degenerate_joint(ctx, tau)
    elif ctx.R >= 0 or max(abs(ctx.alpha), abs(ctx.beta)) < 1.0:
        # the second clause only triggers inside the tolerance band
        joint = assemble(ctx.gamma, ctx.g, obs_a, obs_b, Case.THM3A)
    else:
        eta, tau = thm3b_signs(ctx)
        L = ctx.L[eta, tau]
        if L.norm2() - ctx.s ** 2 > 0:
            z = thm3b_point(ctx, eta, tau)
            joint = assemble(z_cap(z, ctx), z, obs_a, obs_b, Case.THM3B)
            joint.info.update(eta=eta, tau=tau)
        else:
            # tangent ellipses: only reached on the R = 0 surface
            joint = assemble(ctx.gamma, ctx.g, obs_a, obs_b, Case.THM3A)

    # pairs inside the tolerance band are only approximately compatible
    ptol = POSITIVITY_TOL if margin >= 0 else max(POSITIVITY_TOL, math.sqrt(tol))
    report = verify_joint(joint, obs_a, obs_b, ptol)
    if not report.passed:
        raise ConstructionFailed(f"{joint.case.value} candidate failed: {report}")
    return joint


@dataclass(frozen=True)
class VerificationReport:
    marginal_residual: float
    completeness_residual: float
    min_positivity: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.marginal_residual <= MARGINAL_TOL
                and self.completeness_residual <= MARGINAL_TOL
                and self.min_positivity >= -self.tol)


def _residual(e: Effect, f: Effect) -> float:
    diff = e - f
    return max(abs(diff.c0), *(abs(c) for c in diff.c))


def verify_joint(joint: JointObservable, obs_a: SimpleObservable, obs_b: SimpleObservable,
                 tol: float = POSITIVITY_TOL) -> VerificationReport:
    eff = joint.effects
    marg = 0.0
    for mu in SIGNS:
        marg = max(marg, _residual(eff[mu, 1] + eff[mu, -1], effect_of(obs_a, mu)))
        marg = max(marg, _residual(eff[1, mu] + eff[-1, mu], effect_of(obs_b, mu)))
    total = Effect(0.0, ZERO)
    for e in eff.values():
        total = total + e
    comp = _residual(total, Effect(1.0, ZERO))
    pos = min(e.positivity_margin for e in eff.values())
    return VerificationReport(marg, comp, pos, tol)


def is_projector_like(e: Effect, tol: float = 1e-8) -> bool:
    """True when the effect is a non-negative multiple of a rank-1 projector."""
    return abs(e.c0 - e.c.norm()) <= tol and math.isfinite(e.c0)
