"""Seeded random pairs and the cross-criterion equivalence harness."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .analysis import bisect_last_true
from .construction import ConstructionFailed, construct_joint, verify_joint
from .core import SimpleObservable, Vec3, pair_context
from .criteria import CRITERIA, DEFAULT_TOL, Decision, thm1_margin
from .geometry import oracle_compatible, oracle_jm
from .identities import IDENTITIES, bs_mixed_sign_agrees

EQUIV_BAND = 1e-7
ORACLE_BAND = 1e-4


def random_observable(rng: np.random.Generator) -> SimpleObservable:
    x = rng.uniform(-1.0, 1.0)
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    m = rng.uniform(0.0, 1.0 - abs(x))
    return SimpleObservable(float(x), Vec3(*(float(c) for c in v * m)))


def boundary_pair(rng: np.random.Generator, max_tries: int = 50) -> Tuple[SimpleObservable, SimpleObservable]:
    """A pair whose second Bloch vector is rescaled onto the thm1 boundary, then
    nudged by a relative amount spread over 1e-12 .. 1e-2."""
    for _ in range(max_tries):
        a, b = random_observable(rng), random_observable(rng)
        n = b.m.norm()
        if n == 0:
            continue
        unit = b.m / n
        cap = 1.0 - abs(b.x)

        def ok(t: float) -> bool:
            return thm1_margin(pair_context(a, SimpleObservable(b.x, unit * t))) >= 0

        if ok(cap):
            continue
        t = bisect_last_true(ok, 0.0, cap, 1e-15)
        eps = 10.0 ** rng.uniform(-12, -2) * (1 if rng.random() < 0.5 else -1)
        t = min(t * (1.0 + eps), cap)
        return a, SimpleObservable(b.x, unit * t)
    return random_observable(rng), random_observable(rng)


def sample_pairs(n: int, seed: int, boundary_fraction: float = 0.1
                 ) -> Iterator[Tuple[SimpleObservable, SimpleObservable, bool]]:
    """Yield ``(A, B, boundary_targeted)``; every tenth pair (by default) is boundary-targeted."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    period = max(int(round(1.0 / boundary_fraction)), 1) if boundary_fraction > 0 else 0
    for i in range(n):
        if period and i % period == period - 1:
            a, b = boundary_pair(rng)
            yield a, b, True
        else:
            yield random_observable(rng), random_observable(rng), False


def pair_dict(a: SimpleObservable, b: SimpleObservable) -> dict:
    return {"A": {"x": a.x, "m": list(a.m)}, "B": {"x": b.x, "m": list(b.m)}}


@dataclass
class FuzzSummary:
    samples: int = 0
    boundary_targeted: int = 0
    excluded: int = 0
    compared: int = 0
    jointly_measurable: int = 0
    agreement: Dict[str, int] = field(default_factory=dict)
    disagreement_count: int = 0
    disagreements: List[dict] = field(default_factory=list)
    ternary_straddles: int = 0
    construction_cases: Dict[str, int] = field(default_factory=dict)
    construction_failures: List[dict] = field(default_factory=list)
    degenerate_misses: int = 0
    max_marginal_residual: float = 0.0
    min_positivity: float = math.inf
    min_positivity_strict: float = math.inf
    identity_max: Dict[str, float] = field(default_factory=dict)
    bs_mixed_sign_mismatches: int = 0
    oracle_compared: int = 0
    oracle_agree: int = 0
    oracle_from_grid: int = 0
    oracle_disagreements: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.disagreement_count or self.construction_failures or self.oracle_disagreements
                    or self.degenerate_misses or self.bs_mixed_sign_mismatches)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def run_fuzz(samples: int, seed: int, tol: float = DEFAULT_TOL, oracle_samples: int = 0,
             grid: float = 2e-3, refine_levels: int = 3, band: float = EQUIV_BAND,
             oracle_band: float = ORACLE_BAND, construct: bool = True,
             boundary_fraction: float = 0.1, max_report: int = 20) -> FuzzSummary:
    """Compare the four criteria (plus the ``R >= 0`` form of thm2) on seeded pairs;
    optionally construct a joint observable for every compatible pair and run
    the geometric oracle on the first ``oracle_samples`` pairs outside ``oracle_band``."""
    out = FuzzSummary()
    names = list(CRITERIA) + ["thm2_R"]
    out.agreement = {k: 0 for k in names}
    cases: Counter = Counter()
    idmax = {k: 0.0 for k in IDENTITIES}
    for a, b, targeted in sample_pairs(samples, seed, boundary_fraction):
        out.samples += 1
        out.boundary_targeted += targeted
        ctx = pair_context(a, b)
        for k, fn in IDENTITIES.items():
            idmax[k] = max(idmax[k], fn(ctx))
        out.bs_mixed_sign_mismatches += not bs_mixed_sign_agrees(ctx)

        margin = thm1_margin(ctx)
        if out.oracle_compared < oracle_samples and abs(margin) > oracle_band:
            ov = oracle_jm(ctx, grid, refine_levels)
            out.oracle_compared += 1
            out.oracle_from_grid += int(ov.diagnostics["from_grid"])
            if oracle_compatible(ov) == (margin > 0):
                out.oracle_agree += 1
            elif len(out.oracle_disagreements) < max_report:
                out.oracle_disagreements.append({**pair_dict(a, b), "thm1": margin, "oracle": ov.margin})

        if abs(margin) <= band:
            out.excluded += 1
        else:
            out.compared += 1
            ref = margin > 0
            out.jointly_measurable += ref
            verdicts = {k: fn(ctx, tol) for k, fn in CRITERIA.items()}
            flags = {k: v.compatible for k, v in verdicts.items()}
            if not ctx.parallel:
                flags["thm2_R"] = verdicts["thm2"].diagnostics["r_form_margin"] >= 0
            else:
                flags["thm2_R"] = True
            bad = [k for k, f in flags.items() if f != ref]
            for k in names:
                out.agreement[k] += k not in bad
            if any(v.decision is Decision.BOUNDARY for v in verdicts.values()):
                out.ternary_straddles += 1
            out.disagreement_count += bool(bad)
            if bad and len(out.disagreements) < max_report:
                out.disagreements.append({**pair_dict(a, b), "thm1": margin,
                                          "bad": {k: verdicts[k].margin if k in verdicts else None
                                                  for k in bad}})

        if construct and margin >= -tol:
            try:
                joint = construct_joint(a, b, tol, ctx)
            except ConstructionFailed as exc:
                out.construction_failures.append({**pair_dict(a, b), "error": str(exc)})
                continue
            cases[joint.case.value] += 1
            rep = verify_joint(joint, a, b)
            out.max_marginal_residual = max(out.max_marginal_residual, rep.marginal_residual,
                                            rep.completeness_residual)
            out.min_positivity = min(out.min_positivity, rep.min_positivity)
            if margin >= 0:
                out.min_positivity_strict = min(out.min_positivity_strict, rep.min_positivity)
            if not ctx.parallel and ctx.delta_min < 0 and joint.case.value != "DegenerateDelta":
                out.degenerate_misses += 1
    out.construction_cases = dict(sorted(cases.items()))
    out.identity_max = idmax
    return out


def run_identities(samples: int, seed: int, threshold: float = 1e-10):
    """Max residual per identity over ``samples`` seeded pairs; also the sign check of the mixed BS inequality against ``R``."""
    worst = {k: 0.0 for k in IDENTITIES}
    mismatches = 0
    for a, b, _ in sample_pairs(samples, seed, boundary_fraction=0.1):
        ctx = pair_context(a, b)
        for k, fn in IDENTITIES.items():
            worst[k] = max(worst[k], fn(ctx))
        mismatches += not bs_mixed_sign_agrees(ctx)
    rows = [(k, v, v <= threshold) for k, v in worst.items()]
    rows.append(("bs_mixed_sign", float(mismatches), mismatches == 0))
    return rows

