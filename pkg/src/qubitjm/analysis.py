"""Admissible-region boundaries, sharpness trade-off curves and the MUR residual."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .core import PairContext, SimpleObservable, Vec3, f_squares, pair_context, sgn, vec
from .criteria import CRITERIA

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200
ORTHO_TOL = 1e-9


class NoSolution(ValueError):
    """No maximally orthogonal partner exists: every orthogonal ``n <= cap`` is admissible."""

    def __init__(self, msg: str, cap: float):
        super().__init__(msg)
        self.cap = cap


class NotOrthogonal(ValueError):
    pass


def critical_nc(x: float, m: float, y: float) -> float:
    """Sharpness of the maximally orthogonal partner of O(x, m) with bias ``y``."""
    fx2, cfx2 = f_squares(x, m)
    if y * y > cfx2:
        raise NoSolution(f"y^2 = {y * y:.6g} exceeds 1 - F_x^2 = {cfx2:.6g}", 1.0 - abs(y))
    if cfx2 == 0.0:
        return math.sqrt(fx2)
    return math.sqrt(fx2) * math.sqrt(max(1.0 - y * y / cfx2, 0.0))


def bisect_last_true(pred: Callable[[float], bool], lo: float, hi: float,
                     tol: float = BISECT_TOL) -> float:
    """Largest ``t`` in ``[lo, hi]`` with ``pred(t)``, assuming ``pred`` is
    true on an initial segment and ``pred(lo)`` holds."""
    if pred(hi):
        return hi
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _margin_fn(criterion: str):
    fn = CRITERIA[criterion]
    return lambda obs_a, obs_b: fn(pair_context(obs_a, obs_b), 0.0).margin >= 0


def _direction(frame_e1: Vec3, frame_e2: Vec3, theta: float) -> Vec3:
    return frame_e1 * math.cos(theta) + frame_e2 * math.sin(theta)


def _frame(m: Vec3) -> Tuple[Vec3, Vec3]:
    from .geometry import plane_frame

    fr = plane_frame(m, Vec3(0.0, 1.0, 0.0))
    return fr.e1, fr.e2


def n_max_along(obs_a: SimpleObservable, y: float, direction: Vec3,
                criterion: str = "thm1", tol: float = BISECT_TOL) -> float:
    """Largest admissible sharpness of O(y, n * direction) given O(x, m)."""
    ok = _margin_fn(criterion)
    cap = 1.0 - abs(y)
    return bisect_last_true(lambda t: ok(obs_a, SimpleObservable(y, direction * t)), 0.0, cap, tol)


@dataclass(frozen=True)
class BoundaryScan:
    x: float
    m: Vec3
    y: float
    criterion: str
    thetas: np.ndarray
    n_max: np.ndarray
    forward_cone: float
    backward_cone: float
    all_admissible: bool
    n_c: Optional[float]
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.thetas.tolist(), self.n_max.tolist()))


def boundary_scan(x: float, m, y: float, n_angles: int = 181, tol: float = BISECT_TOL,
                  criterion: str = "thm1") -> BoundaryScan:
    m = vec(m)
    obs_a = SimpleObservable(float(x), m)
    if abs(x) + m.norm() > 1 + 1e-12 or abs(y) > 1:
        raise ValueError("invalid scan parameters")
    e1, e2 = _frame(m)
    cap = 1.0 - abs(y)
    thetas = np.linspace(0.0, math.pi, n_angles)
    nmax = np.array([n_max_along(obs_a, y, _direction(e1, e2, t), criterion, tol) for t in thetas])

    ok = _margin_fn(criterion)

    def full(theta: float) -> bool:
        return ok(obs_a, SimpleObservable(y, _direction(e1, e2, theta) * cap))

    at_cap = nmax >= cap - tol
    if at_cap.all():
        fwd = bwd = math.pi
    else:
        i = int(np.argmin(at_cap))          # first angle off the cap
        j = len(at_cap) - 1 - int(np.argmin(at_cap[::-1]))  # last angle off the cap
        fwd = 0.0 if i == 0 else bisect_last_true(full, thetas[i - 1], thetas[i], tol)
        if j == len(at_cap) - 1:
            bwd = 0.0
        else:
            # angle measured from theta = pi
            back = bisect_last_true(lambda t: full(math.pi - t), math.pi - thetas[j + 1],
                                    math.pi - thetas[j], tol)
            bwd = back
    try:
        nc: Optional[float] = critical_nc(x, m.norm(), y)
    except NoSolution:
        nc = None
    _, cfx2 = f_squares(x, m.norm())
    return BoundaryScan(float(x), m, float(y), criterion, thetas, nmax, fwd, bwd,
                        cfx2 <= abs(y), nc, {"tol": tol, "n_angles": n_angles})


@dataclass(frozen=True)
class TradeoffCurve:
    x: float
    y: float
    cos_theta: float
    ms: np.ndarray
    n_max: np.ndarray
    m0: float

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.ms.tolist(), self.n_max.tolist()))


def tradeoff_curve(x: float, y: float, cos_theta: float, m_grid: int = 101,
                   tol: float = BISECT_TOL, criterion: str = "thm1") -> TradeoffCurve:
    if abs(cos_theta) > 1 or abs(x) > 1 or abs(y) > 1:
        raise ValueError("invalid trade-off parameters")
    e1, e2 = Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)
    ndir = e1 * cos_theta + e2 * math.sqrt(max(1.0 - cos_theta ** 2, 0.0))
    mmax = 1.0 - abs(x)
    ms = np.linspace(0.0, mmax, m_grid)
    nmax = np.array([n_max_along(SimpleObservable(x, e1 * mm), y, ndir, criterion, tol) for mm in ms])
    ok = _margin_fn(criterion)
    ncap = 1.0 - abs(y)
    m0 = bisect_last_true(lambda mm: ok(SimpleObservable(x, e1 * mm), SimpleObservable(y, ndir * ncap)),
                          0.0, mmax, tol)
    return TradeoffCurve(float(x), float(y), float(cos_theta), ms, nmax, m0)


def critical_sharpness_pair(x: float, y: float, cos_theta: float, tol: float = BISECT_TOL):
    """``(m0, n0)``: plateau ends of the trade-off curve and of its role-swapped twin."""
    e1, e2 = Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)
    ndir = e1 * cos_theta + e2 * math.sqrt(max(1.0 - cos_theta ** 2, 0.0))
    ok = _margin_fn("thm1")
    m0 = bisect_last_true(lambda t: ok(SimpleObservable(x, e1 * t), SimpleObservable(y, ndir * (1 - abs(y)))),
                          0.0, 1.0 - abs(x), tol)
    n0 = bisect_last_true(lambda t: ok(SimpleObservable(x, e1 * (1 - abs(x))), SimpleObservable(y, ndir * t)),
                          0.0, 1.0 - abs(y), tol)
    return m0, n0


def sharpness_no_tradeoff(x: float, y: float, cos_theta: float) -> bool:
    return (1.0 + sgn(x * y) * cos_theta) * (1.0 - abs(x)) * (1.0 - abs(y)) <= 2.0 * abs(x * y)


@dataclass(frozen=True)
class TradeoffFlags:
    sharpness: bool
    bias: bool


def no_tradeoff_conditions(obs_a: SimpleObservable, obs_b: SimpleObservable) -> TradeoffFlags:
    """Sharpness and bias no-trade-off tests; a zero vector counts as parallel."""
    m, n = obs_a.m, obs_b.m
    mm, nn = m.norm(), n.norm()
    cos_theta = max(-1.0, min(1.0, (m / mm).dot(n / nn))) if mm > 0 and nn > 0 else 1.0
    bias = all(mm + nn + (m + n * t).norm() <= 2.0 for t in (1, -1))
    return TradeoffFlags(sharpness_no_tradeoff(obs_a.x, obs_b.x, cos_theta), bias)


def mur_residual(ctx: PairContext, q1: float, p1: float, q2: float, p2: float) -> float:
    """``Q1^2 Q2^2 - D1^2 (Q2^2 - P2^2) - D2^2 (Q1^2 - P1^2) - P1^2 P2^2``.

    Non-negative for every compatible orthogonal pair when ``0 <= P_i <= Q_i``.
    """
    if abs(ctx.gamma) > ORTHO_TOL:
        raise NotOrthogonal(f"gamma = {ctx.gamma:.3g} is not zero")
    if not (0 <= p1 <= q1 and 0 <= p2 <= q2):
        raise ValueError("weights must satisfy 0 <= P_i <= Q_i")
    d1 = q1 * ctx.m + p1 * abs(ctx.x)
    d2 = q2 * ctx.n + p2 * abs(ctx.y)
    return (q1 * q2) ** 2 - d1 ** 2 * (q2 ** 2 - p2 ** 2) - d2 ** 2 * (q1 ** 2 - p1 ** 2) - (p1 * p2) ** 2


mur_check = mur_residual
