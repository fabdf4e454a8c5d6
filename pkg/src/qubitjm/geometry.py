"""Plane geometry of the feasible set of joint observables.

Every joint observable of O(x, m) and O(y, n) is fixed by a scalar ``Z`` and
a vector ``z``.  Projecting ``z`` onto the plane of ``m`` and ``n`` keeps
positivity, and the best ``Z`` for a given ``z`` is :func:`z_cap`, so the
pair is compatible iff the intersection of four elliptical regions in that
plane is non-empty.  This module provides membership tests for those
regions, closed-form intersection points of neighbouring ellipses, and a
grid-search feasibility oracle that does not use any of the closed-form
criteria.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .construction import thm3b_point
from .core import SIGN_PAIRS, SIGNS, ZERO, PairContext, Vec3
from .criteria import Verdict

#: rounding allowance on region membership; covers feasible sets with empty
#: interior (sharp observables) whose points are reached only to ~1e-16
MEMBER_TOL = 1e-12


class DegenerateGeometry(ValueError):
    """Raised for operations that need ``m x n != 0``."""


@dataclass(frozen=True)
class PlaneFrame:
    e1: Vec3
    e2: Vec3

    def to_plane(self, z: Vec3) -> Tuple[float, float]:
        return z.dot(self.e1), z.dot(self.e2)

    def from_plane(self, u: float, v: float) -> Vec3:
        return self.e1 * u + self.e2 * v


def _unit_orthogonal(e1: Vec3) -> Vec3:
    axis = min(range(3), key=lambda i: abs(e1[i]))
    basis = Vec3(*(1.0 if i == axis else 0.0 for i in range(3)))
    w = basis - e1 * basis.dot(e1)
    return w / w.norm()


def plane_frame(m: Vec3, n: Vec3) -> PlaneFrame:
    """Orthonormal frame of span{m, n} with ``e1`` along ``m`` (or ``n``, or x-axis)."""
    if m.norm() > 0:
        e1 = m / m.norm()
    elif n.norm() > 0:
        e1 = n / n.norm()
    else:
        e1 = Vec3(1.0, 0.0, 0.0)
    w = n - e1 * n.dot(e1)
    w = w - e1 * w.dot(e1)  # second pass restores orthogonality at tiny angles
    if w.norm() > 1e-12 * max(n.norm(), 1.0):
        e2 = w / w.norm()
    else:
        e2 = _unit_orthogonal(e1)
    return PlaneFrame(e1, e2)


class RegionKind(str, enum.Enum):
    EX = "Ex"
    EY = "Ey"
    E4 = "E4"


@dataclass(frozen=True)
class RegionSpec:
    kind: RegionKind
    sign: int
    foci: Tuple[Vec3, ...]
    bound: float


def region_ex(ctx: PairContext, mu: int) -> RegionSpec:
    return RegionSpec(RegionKind.EX, mu, (ctx.q[1, mu], ctx.q[-1, mu]), 2.0 * ctx.A[mu])


def region_ey(ctx: PairContext, nu: int) -> RegionSpec:
    return RegionSpec(RegionKind.EY, nu, (ctx.q[nu, 1], ctx.q[nu, -1]), 2.0 * ctx.B[nu])


def region_e4(ctx: PairContext) -> RegionSpec:
    return RegionSpec(RegionKind.E4, 0, tuple(ctx.q[k] for k in SIGN_PAIRS), 4.0)


def feasibility_regions(ctx: PairContext) -> List[RegionSpec]:
    return [region_ex(ctx, 1), region_ex(ctx, -1), region_ey(ctx, 1), region_ey(ctx, -1)]


def in_region(region: RegionSpec, z: Vec3) -> float:
    """``bound - sum |z - focus|``; non-negative means ``z`` is a member."""
    return region.bound - sum((z - f).norm() for f in region.foci)


def feasibility_margin(ctx: PairContext, z: Vec3) -> float:
    """Smallest membership margin of ``z`` over the four feasibility regions."""
    return min(in_region(r, z) for r in feasibility_regions(ctx))


def ellipse_intersections(mu: int, nu: int, ctx: PairContext) -> List[Vec3]:
    """Intersection points of the boundaries of ``E_x^mu`` and ``E_y^nu``."""
    if ctx.parallel:
        raise DegenerateGeometry("ellipse intersections need m x n != 0")
    dlt = ctx.delta[mu * nu]
    if dlt < 0:
        return []
    s2 = ctx.s * ctx.s
    L, K = ctx.L[mu, nu], ctx.K[mu, nu]
    denom = L.norm2() - s2
    root = math.sqrt(max(s2 * ctx.a[mu] * ctx.b[nu] * dlt, 0.0))
    base = ctx.d[mu, nu] + s2 * ctx.D[mu, nu] / denom
    radii = [base + root / denom, base - root / denom] if root > 0 else [base]
    focus = ctx.q[nu, mu]
    return [focus + (K - L * r).cross(ctx.svec) / s2 for r in radii]


def _candidates(ctx: PairContext) -> List[Vec3]:
    m, n = ctx.mvec, ctx.nvec
    pts = [ZERO, m, -m, n, -n, m * ctx.y + n * ctx.x]
    if not ctx.parallel:
        pts.append(ctx.g)
        for mu, nu in SIGN_PAIRS:
            if ctx.L[mu, nu].norm2() - ctx.s ** 2 > 0:
                pts.append(thm3b_point(ctx, mu, nu))
            hits = ellipse_intersections(mu, nu, ctx)
            pts.extend(hits)
            if len(hits) == 2:
                pts.append((hits[0] + hits[1]) * 0.5)
    return [p for p in pts if all(math.isfinite(c) for c in p)]


class _PlaneProblem:
    """Vectorised min-region margin in plane coordinates."""

    def __init__(self, ctx: PairContext):
        self.frame = plane_frame(ctx.mvec, ctx.nvec)
        regions = feasibility_regions(ctx)
        self.foci = np.array([[self.frame.to_plane(f) for f in r.foci] for r in regions])
        self.bounds = np.array([r.bound for r in regions])
        # each region lies in the disk around its center with radius bound / 2
        centers = self.foci.mean(axis=1)
        radii = self.bounds / 2.0
        self.lo = np.maximum((centers - radii[:, None]).max(axis=0), -2.0)
        self.hi = np.minimum((centers + radii[:, None]).min(axis=0), 2.0)

    def margins(self, pts: np.ndarray) -> np.ndarray:
        diff = pts[:, None, None, :] - self.foci[None, :, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=-1)).sum(axis=-1)
        return (self.bounds[None, :] - dist).min(axis=1)


def _grid(lo, hi, step):
    us = np.arange(lo[0], hi[0] + step / 2, step)
    vs = np.arange(lo[1], hi[1] + step / 2, step)
    return us, vs


def _grid_search(prob: _PlaneProblem, step: float, refine_levels: int, tol: float,
                 chunk: int = 200_000, keep: int = 4):
    """Best (margin, point) found on a grid plus local refinements."""
    best_m, best_p = -math.inf, None
    seeds: List[Tuple[float, np.ndarray]] = []
    if np.any(prob.lo > prob.hi):
        return best_m, best_p
    us, vs = _grid(prob.lo, prob.hi, step)
    rows = max(1, chunk // max(len(vs), 1))
    for i in range(0, len(us), rows):
        uu, vv = np.meshgrid(us[i:i + rows], vs, indexing="ij")
        pts = np.stack([uu.ravel(), vv.ravel()], axis=1)
        marg = prob.margins(pts)
        top = np.argsort(marg)[-keep:]
        seeds.extend((float(marg[k]), pts[k]) for k in top)
        if marg[top[-1]] >= -tol:
            return float(marg[top[-1]]), pts[top[-1]]
    seeds = sorted(seeds, key=lambda t: t[0])[-keep:]
    best_m, best_p = seeds[-1]
    h = step
    for _ in range(refine_levels):
        fine = h / 10.0
        new_seeds = []
        for _, p in seeds:
            off = np.arange(-2 * h, 2 * h + fine / 2, fine)
            uu, vv = np.meshgrid(p[0] + off, p[1] + off, indexing="ij")
            pts = np.stack([uu.ravel(), vv.ravel()], axis=1)
            marg = prob.margins(pts)
            top = np.argsort(marg)[-keep:]
            new_seeds.extend((float(marg[k]), pts[k]) for k in top)
        seeds = sorted(new_seeds, key=lambda t: t[0])[-keep:]
        if seeds[-1][0] > best_m:
            best_m, best_p = seeds[-1]
        if best_m >= -tol:
            break
        h = fine
    return best_m, best_p


def feasible_point(ctx: PairContext, grid_step: float = 2e-3, refine_levels: int = 3,
                   tol: float = MEMBER_TOL, use_candidates: bool = True) -> Optional[Vec3]:
    """A point of the feasible region, or ``None`` if the search finds none."""
    point, _, _ = _search(ctx, grid_step, refine_levels, tol, use_candidates)
    return point


def _search(ctx, grid_step, refine_levels, tol, use_candidates):
    best_m, best_z, source = -math.inf, None, "none"
    if use_candidates:
        for z in _candidates(ctx):
            mg = feasibility_margin(ctx, z)
            if mg > best_m:
                best_m, best_z = mg, z
            if mg >= -tol:
                return z, mg, "candidate"
    prob = _PlaneProblem(ctx)
    gm, gp = _grid_search(prob, grid_step, refine_levels, tol)
    if gp is not None:
        z = prob.frame.from_plane(float(gp[0]), float(gp[1]))
        gm = feasibility_margin(ctx, z)
        if gm > best_m:
            best_m, best_z = gm, z
        if gm >= -tol:
            return z, gm, "grid"
    return None, best_m, source


def oracle_jm(ctx: PairContext, grid_step: float = 2e-3, refine_levels: int = 3,
              tol: float = MEMBER_TOL, use_candidates: bool = True) -> Verdict:
    """Brute-force feasibility verdict; margin is the best min-region margin probed."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    point, margin, source = _search(ctx, grid_step, refine_levels, tol, use_candidates)
    diag = {"found": float(point is not None), "from_grid": float(source == "grid")}
    return Verdict("oracle", margin, tol, diag)


def oracle_compatible(verdict: Verdict) -> bool:
    return verdict.diagnostics["found"] == 1.0
