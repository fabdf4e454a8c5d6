import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from qubitjm.construction import assemble, verify_joint, z_cap
from qubitjm.core import SIGN_PAIRS, Vec3, ZERO, pair_context
from qubitjm.criteria import srh_c3_margin, thm1_margin
from qubitjm.geometry import (
    DegenerateGeometry,
    ellipse_intersections,
    feasible_point,
    in_region,
    oracle_compatible,
    oracle_jm,
    plane_frame,
    region_e4,
    region_ex,
    region_ey,
)

from conftest import obs, pairs, random_pairs

SHARP_ORTHO = (obs(0, (1, 0, 0)), obs(0, (0, 1, 0)))


@given(pairs)
def test_plane_frame_is_orthonormal(p):
    a, b = p
    fr = plane_frame(a.m, b.m)
    assert fr.e1.norm() == pytest.approx(1.0)
    assert fr.e2.norm() == pytest.approx(1.0)
    assert abs(fr.e1.dot(fr.e2)) < 1e-12
    if a.m.norm() > 0:
        assert fr.e1.dot(a.m) == pytest.approx(a.m.norm())


def test_plane_frame_fallbacks():
    assert plane_frame(ZERO, Vec3(0.0, 0.0, 2.0)).e1 == Vec3(0.0, 0.0, 1.0)
    fr = plane_frame(ZERO, ZERO)
    assert fr.e1 == Vec3(1.0, 0.0, 0.0) and abs(fr.e2.dot(fr.e1)) == 0.0


def test_plane_roundtrip():
    fr = plane_frame(Vec3(0.3, 0.1, 0.0), Vec3(0.0, 0.2, 0.5))
    z = fr.from_plane(0.7, -0.2)
    assert fr.to_plane(z) == pytest.approx((0.7, -0.2))


@given(pairs)
def test_region_centres_are_members(p):
    ctx = pair_context(*p)
    for mu in (1, -1):
        assert in_region(region_ex(ctx, mu), ctx.nvec * mu) == pytest.approx(2 * (1 - mu * ctx.x) - 2 * ctx.m)
        assert in_region(region_ex(ctx, mu), ctx.nvec * mu) >= -1e-12
        assert in_region(region_ey(ctx, mu), ctx.mvec * mu) >= -1e-12


@given(pairs)
def test_shared_focus_in_both_regions(p):
    ctx = pair_context(*p)
    for mu, nu in SIGN_PAIRS:
        f = ctx.q[nu, mu]
        assert in_region(region_ex(ctx, mu), f) >= -1e-12
        assert in_region(region_ey(ctx, nu), f) >= -1e-12


def _random_points(rng, ctx, k):
    fr = plane_frame(ctx.mvec, ctx.nvec)
    uv = rng.uniform(-2, 2, size=(k, 2))
    return [fr.from_plane(float(u), float(v)) for u, v in uv]


def test_x_pair_intersection_is_inside_oval(rng):
    for a, b in random_pairs(rng, 200):
        ctx = pair_context(a, b)
        for z in _random_points(rng, ctx, 50):
            if in_region(region_ex(ctx, 1), z) >= 0 and in_region(region_ex(ctx, -1), z) >= 0:
                assert in_region(region_e4(ctx), z) >= -1e-12


def test_regions_are_convex(rng):
    for a, b in random_pairs(rng, 100):
        ctx = pair_context(a, b)
        for region in (region_ex(ctx, 1), region_ey(ctx, -1), region_e4(ctx)):
            members = [z for z in _random_points(rng, ctx, 60) if in_region(region, z) >= 0]
            for z1, z2 in zip(members, members[1:]):
                assert in_region(region, (z1 + z2) * 0.5) >= -1e-12


@settings(max_examples=300)
@given(pairs)
def test_intersections_lie_on_both_boundaries(p):
    ctx = pair_context(*p)
    assume(not ctx.parallel and ctx.s > 1e-6)
    for mu, nu in SIGN_PAIRS:
        pts = ellipse_intersections(mu, nu, ctx)
        if ctx.delta[mu * nu] < 0:
            assert pts == []
        for z in pts:
            assert abs(in_region(region_ex(ctx, mu), z)) <= 1e-9
            assert abs(in_region(region_ey(ctx, nu), z)) <= 1e-9


def test_intersections_sharp_orthogonal():
    ctx = pair_context(*SHARP_ORTHO)
    for mu, nu in SIGN_PAIRS:
        assert ctx.a[mu] == 0 and ctx.b[nu] == 0
        pts = ellipse_intersections(mu, nu, ctx)
        assert len(pts) == 1
        # zero discriminant: the single solution is r = 0, the shared focus
        assert (pts[0] - ctx.q[nu, mu]).norm() < 1e-15


def test_intersections_need_non_parallel():
    with pytest.raises(DegenerateGeometry):
        ellipse_intersections(1, 1, pair_context(obs(0, (0.5, 0, 0)), obs(0, (0.2, 0, 0))))


def test_feasible_point_examples():
    ctx = pair_context(obs(0, (0.7, 0, 0)), obs(0, (0, 0.7, 0)))
    assert feasible_point(ctx) == ZERO
    assert feasible_point(pair_context(*SHARP_ORTHO)) is None


@settings(max_examples=200)
@given(pairs)
def test_feasible_point_yields_joint_observable(p):
    ctx = pair_context(*p)
    z = feasible_point(ctx)
    assume(z is not None)
    rep = verify_joint(assemble(z_cap(z, ctx), z, *p), *p)
    assert rep.marginal_residual <= 1e-12
    assert rep.min_positivity >= -1e-11


def test_oracle_examples():
    par = pair_context(obs(0.1, (0.7, 0, 0)), obs(-0.2, (0.4, 0, 0)))
    assert oracle_compatible(oracle_jm(par))
    hard = pair_context(obs(0, (0.99, 0, 0)), obs(0, (0, 0.99, 0)))
    assert not oracle_compatible(oracle_jm(hard))
    with pytest.raises(ValueError):
        oracle_jm(par, grid_step=0)


def test_oracle_agrees_with_thm1(rng):
    checked = 0
    for a, b in random_pairs(rng, 1500):
        ctx = pair_context(a, b)
        margin = thm1_margin(ctx)
        if abs(margin) <= 1e-4:
            continue
        checked += 1
        assert oracle_compatible(oracle_jm(ctx)) == (margin > 0)
    assert checked > 1000


def test_grid_alone_agrees_with_thm1(rng):
    checked = 0
    for a, b in random_pairs(rng, 200):
        if max(abs(a.x) + a.m.norm(), abs(b.x) + b.m.norm()) > 1 - 1e-6:
            continue  # sharp observables leave the feasible set without interior
        ctx = pair_context(a, b)
        margin = thm1_margin(ctx)
        if abs(margin) <= 1e-3:
            continue
        v = oracle_jm(ctx, grid_step=2e-3, use_candidates=False)
        checked += 1
        assert oracle_compatible(v) == (margin > 0)
    assert checked > 40


def test_oracle_finds_pairs_with_some_intersection_in_oval(rng):
    for a, b in random_pairs(rng, 600):
        ctx = pair_context(a, b)
        if ctx.parallel or feasible_point(ctx) is None:
            continue
        hits = [z for mu, nu in SIGN_PAIRS for z in ellipse_intersections(mu, nu, ctx)]
        if hits:
            assert max(in_region(region_e4(ctx), z) for z in hits) >= -1e-9


@settings(max_examples=400)
@given(pairs)
def test_g_in_oval_iff_R_nonnegative(p):
    ctx = pair_context(*p)
    assume(not ctx.parallel and abs(ctx.R) > 1e-9)
    assert (in_region(region_e4(ctx), ctx.g) >= 0) == (ctx.R >= 0)


@settings(max_examples=400, suppress_health_check=[HealthCheck.filter_too_much])
@given(pairs)
def test_c3_disjunction(p):
    ctx = pair_context(*p)
    assume(not ctx.parallel and ctx.h_plus >= 0 and ctx.h_minus >= 0)
    c3 = srh_c3_margin(ctx)
    assume(abs(c3) > 1e-9 and abs(ctx.R) > 1e-9 and abs(abs(ctx.beta) - 1) > 1e-9)
    assert (c3 >= 0) == (ctx.R >= 0 or abs(ctx.beta) >= 1)


@given(pairs)
def test_pi_is_max_of_four(p):
    ctx = pair_context(*p)
    assume(not ctx.parallel)
    s2 = ctx.s ** 2
    four = max(s2 * (ctx.alpha - 1), s2 * (-ctx.alpha - 1), s2 * (ctx.beta - 1), s2 * (-ctx.beta - 1))
    assert ctx.Pi == pytest.approx(four, rel=1e-9, abs=1e-12)
