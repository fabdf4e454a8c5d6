"""Bloch-form types for two-outcome qubit observables and their pair invariants.

Everything here is plain float arithmetic on 3-vectors.  Operators
``c0 * I + c . sigma`` are kept in Bloch form throughout, so positivity of a
2x2 effect is the scalar test ``c0 >= |c|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Literal, NamedTuple, Tuple

Sign = Literal[1, -1]
SIGNS: Tuple[Sign, Sign] = (1, -1)
SIGN_PAIRS: Tuple[Tuple[Sign, Sign], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))

#: tolerance on ``|x| + m <= 1`` when validating observables
EPS_VALID = 1e-12
#: ``|m x n|`` at or below this is treated as parallel
EPS_PARALLEL = 1e-12
#: below this ``sin^2`` of the angle between m and n the rational invariants are computed exactly
ILL_CONDITIONED = 1e-4


class InvalidObservable(ValueError):
    """Raised when a bias/Bloch-vector pair does not define a POVM."""


def sgn(f: float) -> Sign:
    """Sign with the convention sgn(0) = +1."""
    return 1 if f >= 0 else -1


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, o):  # type: ignore[override]
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o):
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, k):  # type: ignore[override]
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Vec3(self.x / k, self.y / k, self.z / k)

    def dot(self, o) -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o) -> "Vec3":
        return Vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.hypot(self.x, self.y, self.z)


ZERO = Vec3(0.0, 0.0, 0.0)


def vec(v) -> Vec3:
    """Coerce any length-3 sequence to a :class:`Vec3` of floats."""
    a, b, c = v
    return Vec3(float(a), float(b), float(c))


@dataclass(frozen=True)
class Effect:
    """Hermitian 2x2 operator ``c0 * I + c . sigma``."""

    c0: float
    c: Vec3

    def __add__(self, o: "Effect") -> "Effect":
        return Effect(self.c0 + o.c0, self.c + o.c)

    def __sub__(self, o: "Effect") -> "Effect":
        return Effect(self.c0 - o.c0, self.c - o.c)

    def scaled(self, k: float) -> "Effect":
        return Effect(self.c0 * k, self.c * k)

    @property
    def trace(self) -> float:
        return 2.0 * self.c0

    @property
    def positivity_margin(self) -> float:
        """Smallest eigenvalue ``c0 - |c|``."""
        return self.c0 - self.c.norm()

    def matrix(self):
        """Dense complex 2x2 matrix, for cross-checks only."""
        import numpy as np

        c0, (a, b, c) = self.c0, self.c
        return np.array([[c0 + c, a - 1j * b], [a + 1j * b, c0 - c]])


def effect_is_positive(e: Effect, tol: float = 0.0) -> bool:
    return e.c0 >= e.c.norm() - tol


@dataclass(frozen=True)
class SimpleObservable:
    """Two-outcome POVM ``{(1 +/- (x + m . sigma)) / 2}``."""

    x: float
    m: Vec3

    @property
    def sharpness(self) -> float:
        return self.m.norm()

    def relabeled(self) -> "SimpleObservable":
        """Same observable with the outcome labels swapped."""
        return SimpleObservable(-self.x, -self.m)


def make_observable(x: float, m) -> SimpleObservable:
    x = float(x)
    m = vec(m)
    if not (math.isfinite(x) and all(math.isfinite(c) for c in m)):
        raise InvalidObservable(f"non-finite input x={x!r}, m={m!r}")
    if abs(x) + m.norm() > 1.0 + EPS_VALID:
        raise InvalidObservable(f"|x| + |m| = {abs(x) + m.norm():.17g} exceeds 1")
    return SimpleObservable(x, m)


def effects_of(obs: SimpleObservable) -> Tuple[Effect, Effect]:
    """The two effects ``(O_+, O_-)`` of an observable."""
    return (
        Effect((1.0 + obs.x) / 2.0, obs.m * 0.5),
        Effect((1.0 - obs.x) / 2.0, obs.m * -0.5),
    )


def effect_of(obs: SimpleObservable, sign: int) -> Effect:
    return Effect((1.0 + sign * obs.x) / 2.0, obs.m * (sign * 0.5))


def ellipse_root(x: float, m: float) -> float:
    """``sqrt(((1+x)^2 - m^2)((1-x)^2 - m^2))``, radicands clamped at zero."""
    m2 = m * m
    return math.sqrt(max((1.0 + x) ** 2 - m2, 0.0) * max((1.0 - x) ** 2 - m2, 0.0))


def f_squares(x: float, m: float) -> Tuple[float, float]:
    """Return ``(F^2, 1 - F^2)`` for
    ``F = (sqrt((1+x)^2 - m^2) + sqrt((1-x)^2 - m^2)) / 2``.

    With ``r = ellipse_root(x, m)`` both are formed without cancellation:
    ``F^2 = (1 + x^2 - m^2 + r) / 2`` and ``1 - F^2 = 2 m^2 / (1 - x^2 + m^2 + r)``.
    """
    m2 = m * m
    r = ellipse_root(x, m)
    f2 = max(0.5 * (1.0 + x * x - m2 + r), 0.0)
    den = 1.0 - x * x + m2 + r
    return f2, (2.0 * m2 / den if den > 0.0 else 1.0 - f2)


def f_value(x: float, m: float) -> float:
    return math.sqrt(f_squares(x, m)[0])


def bias_ratio(x: float, f2: float) -> float:
    """``x^2 / F^2`` with the limit value 0 at ``F = 0`` (only x=0, m=1)."""
    return x * x / f2 if f2 > 0.0 else 0.0


@dataclass(frozen=True)
class PairContext:
    """Every derived quantity for a pair of simple observables.

    ``root_a = sqrt(a+ a-)`` and ``root_b = sqrt(b+ b-)`` are shared by every
    formula that needs them so that square-root rounding near sharp
    observables enters each formula identically.

    Sign-indexed quantities are dicts: ``A[mu]``, ``a[mu]``, ``B[nu]``,
    ``b[nu]``, ``delta[tau]`` and ``q``, ``d``, ``D``, ``L``, ``K`` keyed by
    ``(mu, nu)``.  For parallel pairs (``s <= EPS_PARALLEL``) the quantities
    that divide by ``s^2`` (``alpha``, ``beta``, ``g``, ``R``, ``D``) are NaN;
    the products ``s2alpha``, ``s2beta``, ``s2R`` and ``Pi`` stay finite.
    """

    a_obs: SimpleObservable
    b_obs: SimpleObservable
    x: float
    y: float
    m: float
    n: float
    mvec: Vec3
    nvec: Vec3
    svec: Vec3
    s: float
    cdot: float
    gamma: float
    fx: float
    fy: float
    fx2: float
    fy2: float
    one_minus_fx2: float
    one_minus_fy2: float
    x_ratio: float
    y_ratio: float
    parallel: bool
    s2alpha: float
    s2beta: float
    alpha: float
    beta: float
    g: Vec3
    R: float
    s2R: float
    delta: Dict[int, float]
    A: Dict[int, float]
    B: Dict[int, float]
    a: Dict[int, float]
    b: Dict[int, float]
    q: Dict[Tuple[int, int], Vec3]
    d: Dict[Tuple[int, int], float]
    D: Dict[Tuple[int, int], float]
    L: Dict[Tuple[int, int], Vec3]
    K: Dict[Tuple[int, int], Vec3]
    root_a: float
    root_b: float
    f_minus: float
    f_plus: float
    Pi: float
    l_radicand: float
    l: float
    h_plus: float
    h_minus: float

    @property
    def delta_min(self) -> float:
        return min(self.delta.values())


def _exact_invariants(x: float, y: float, mv: Vec3, nv: Vec3) -> dict:
    """Rational pair invariants evaluated in exact arithmetic on the float inputs, then rounded.

    For nearly parallel m and n, ``s^2 alpha`` and ``s^2 beta`` are O(1) terms
    cancelling down to O(s^2), so float rounding is amplified by 1/sin^2.
    """
    X, Y = Fraction(x), Fraction(y)
    M = Vec3(*map(Fraction, mv))
    N = Vec3(*map(Fraction, nv))
    m2, n2, cdot = M.norm2(), N.norm2(), M.dot(N)
    gamma = cdot - X * Y
    svec = M.cross(N)
    s2 = svec.norm2()
    out = {"cdot": float(cdot), "gamma": float(gamma), "svec": Vec3(*map(float, svec)), "s2": s2}
    A = {mu: 1 - mu * X for mu in SIGNS}
    B = {nu: 1 - nu * Y for nu in SIGNS}
    out["a"] = {mu: float(A[mu] ** 2 - m2) for mu in SIGNS}
    out["b"] = {nu: float(B[nu] ** 2 - n2) for nu in SIGNS}
    out["delta"] = {tau: float((M - N * tau).norm2() - (X - tau * Y) ** 2) for tau in SIGNS}
    s2alpha = (Y + gamma * X) * n2 - (X + gamma * Y) * cdot
    s2beta = (X + gamma * Y) * m2 - (Y + gamma * X) * cdot
    out.update(s2alpha=float(s2alpha), s2beta=float(s2beta),
               Pi=float(max(abs(s2alpha), abs(s2beta)) - s2))
    if s2 <= EPS_PARALLEL ** 2:
        return out
    alpha, beta = s2alpha / s2, s2beta / s2
    g = M * alpha + N * beta
    R = 1 + X * X + Y * Y + gamma * gamma - m2 - n2 - g.norm2()
    out.update(alpha=float(alpha), beta=float(beta), g=Vec3(*map(float, g)), R=float(R), s2R=float(s2 * R))
    out["d"] = {(mu, nu): float(1 - mu * X - nu * Y + mu * nu * gamma) for mu, nu in SIGN_PAIRS}
    out["D"] = {(mu, nu): float(nu * A[mu] * alpha + mu * B[nu] * beta + mu * nu * gamma - 1)
                for mu, nu in SIGN_PAIRS}
    return out


def pair_context(obs_a: SimpleObservable, obs_b: SimpleObservable) -> PairContext:
    x, y = obs_a.x, obs_b.x
    mv, nv = obs_a.m, obs_b.m
    m2, n2 = mv.norm2(), nv.norm2()
    m, n = mv.norm(), nv.norm()
    cdot = mv.dot(nv)
    gamma = cdot - x * y
    svec = mv.cross(nv)
    s2 = svec.norm2()
    exact = None
    if 0.0 < s2 < ILL_CONDITIONED * m2 * n2:
        exact = _exact_invariants(x, y, mv, nv)
        cdot, gamma, svec = exact["cdot"], exact["gamma"], exact["svec"]
        s2 = float(exact["s2"])
    s = math.sqrt(s2)
    parallel = s <= EPS_PARALLEL

    fx2, cfx2 = f_squares(x, m)
    fy2, cfy2 = f_squares(y, n)
    fx, fy = math.sqrt(fx2), math.sqrt(fy2)
    x_ratio, y_ratio = bias_ratio(x, fx2), bias_ratio(y, fy2)
    # 1 - F_x^2 - F_y^2, subtracting the smaller square from the other's complement
    one_minus_sum = cfx2 - fy2 if fx2 >= fy2 else cfy2 - fx2
    f_minus = one_minus_sum * (1.0 - x_ratio - y_ratio)

    A = {mu: 1.0 - mu * x for mu in SIGNS}
    B = {nu: 1.0 - nu * y for nu in SIGNS}
    a = {mu: A[mu] ** 2 - m2 for mu in SIGNS}
    b = {nu: B[nu] ** 2 - n2 for nu in SIGNS}
    root_a, root_b = ellipse_root(x, m), ellipse_root(y, n)
    f_plus = f_minus + root_a * root_b
    delta = {tau: (mv - nv * tau).norm2() - (x - tau * y) ** 2 for tau in SIGNS}

    s2alpha = (y + gamma * x) * n2 - (x + gamma * y) * cdot
    s2beta = (x + gamma * y) * m2 - (y + gamma * x) * cdot
    Pi = max(abs(s2alpha), abs(s2beta)) - s2
    base_r = 1.0 + x * x + y * y + gamma * gamma - m2 - n2
    if parallel:
        nan = math.nan
        alpha = beta = R = nan
        g = Vec3(nan, nan, nan)
        s2R = (gamma * gamma - f_minus) * (f_plus - gamma * gamma)
    else:
        alpha, beta = s2alpha / s2, s2beta / s2
        g = mv * alpha + nv * beta
        R = base_r - g.norm2()
        s2R = s2 * R

    if exact is not None:
        a, b, delta = exact["a"], exact["b"], exact["delta"]
        s2alpha, s2beta, Pi = exact["s2alpha"], exact["s2beta"], exact["Pi"]
        if not parallel:
            alpha, beta, g, R, s2R = (exact[k] for k in ("alpha", "beta", "g", "R", "s2R"))

    q, d, D, L, K = {}, {}, {}, {}, {}
    for mu, nu in SIGN_PAIRS:
        q[mu, nu] = mv * mu + nv * nu
        d[mu, nu] = 1.0 - mu * x - nu * y + mu * nu * gamma
        D[mu, nu] = nu * A[mu] * alpha + mu * B[nu] * beta + mu * nu * gamma - 1.0
        L[mu, nu] = nv * (nu * A[mu]) - mv * (mu * B[nu])
        K[mu, nu] = nv * (nu * a[mu]) - mv * (mu * b[nu])
    if exact is not None and not parallel:
        d, D = exact["d"], exact["D"]

    l_radicand = y * y + m2 - abs(y) * (1.0 - x * x + m2)

    return PairContext(
        a_obs=obs_a, b_obs=obs_b, x=x, y=y, m=m, n=n, mvec=mv, nvec=nv,
        svec=svec, s=s, cdot=cdot, gamma=gamma, fx=fx, fy=fy, fx2=fx2,
        fy2=fy2, one_minus_fx2=cfx2, one_minus_fy2=cfy2,
        x_ratio=x_ratio, y_ratio=y_ratio, parallel=parallel,
        s2alpha=s2alpha, s2beta=s2beta, alpha=alpha, beta=beta, g=g, R=R,
        s2R=s2R, delta=delta, A=A, B=B, a=a, b=b, q=q, d=d, D=D, L=L, K=K,
        root_a=root_a, root_b=root_b, f_minus=f_minus, f_plus=f_plus, Pi=Pi, l_radicand=l_radicand,
        l=math.sqrt(max(l_radicand, 0.0)),
        h_plus=m2 - (gamma + y) ** 2, h_minus=m2 - (gamma - y) ** 2,
    )
