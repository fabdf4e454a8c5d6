"""Command-line interface.

Exit codes: 0 ok, 1 input error, 2 incompatible pair, 3 property or
equivalence violation.
"""
from __future__ import annotations

import json
import math
import sys
from typing import Any, Tuple

import click

from .analysis import boundary_scan, tradeoff_curve
from .construction import ConstructionFailed, Incompatible, construct_joint, verify_joint
from .core import SimpleObservable, make_observable, pair_context
from .criteria import CRITERIA, DEFAULT_TOL, Decision, all_verdicts
from .fuzz import run_fuzz, run_identities
from .statesim import empirical_marginal_check, qubit_state, sample_outcomes

EXIT_OK, EXIT_INPUT, EXIT_INCOMPATIBLE, EXIT_VIOLATION = 0, 1, 2, 3
SIM_THRESHOLD = 5.0


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _clean(obj: Any) -> Any:
    """Make a document JSON-safe; non-finite floats become strings."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _emit(doc: Any) -> None:
    click.echo(json.dumps(_clean(doc), indent=2, sort_keys=False))


def _g(v: float) -> str:
    return format(float(v), ".17g")


def _observable(doc: Any, key: str) -> SimpleObservable:
    try:
        part = doc[key]
        m = [float(c) for c in part["m"]]
        if len(m) != 3:
            raise ValueError(f"{key}.m must have three components")
        return make_observable(float(part["x"]), m)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad observable {key}: {exc}") from exc


def load_pair(path: str) -> Tuple[SimpleObservable, SimpleObservable]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read pair file: {exc}") from exc
    return _observable(doc, "A"), _observable(doc, "B")


def _effects_doc(joint) -> dict:
    return {f"{mu:+d}{nu:+d}": {"c0": e.c0, "c": list(e.c)} for (mu, nu), e in joint.effects.items()}


def _derived(ctx) -> dict:
    return {"F_x": math.sqrt(ctx.fx2), "F_y": math.sqrt(ctx.fy2), "gamma": ctx.gamma,
            "R": ctx.R, "alpha": ctx.alpha, "beta": ctx.beta, "s": ctx.s}


class _Group(click.Group):
    """Click group whose usage errors exit with the input-error code."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise


@click.group(cls=_Group)
def main() -> None:
    """Joint measurability of two unsharp qubit observables."""


@main.command()
@click.argument("pairfile", type=click.Path())
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
def check(pairfile: str, tol: float) -> None:
    """Decide a pair with every criterion and report whether they agree."""
    a, b = load_pair(pairfile)
    ctx = pair_context(a, b)
    verdicts = all_verdicts(ctx, tol)
    decided = {v.decision for v in verdicts.values()} - {Decision.BOUNDARY}
    agree = len(decided) <= 1
    _emit({
        "verdicts": {k: {"decision": v.decision, "margin": v.margin, "diagnostics": v.diagnostics}
                     for k, v in verdicts.items()},
        "derived": _derived(ctx),
        "agree": agree,
    })
    sys.exit(EXIT_OK if agree else EXIT_VIOLATION)


@main.command()
@click.argument("pairfile", type=click.Path())
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
def construct(pairfile: str, tol: float) -> None:
    """Build and verify a joint observable."""
    a, b = load_pair(pairfile)
    try:
        joint = construct_joint(a, b, tol)
    except Incompatible as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INCOMPATIBLE)
    except ConstructionFailed as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VIOLATION)
    rep = verify_joint(joint, a, b)
    _emit({
        "case": joint.case,
        "Z": joint.Z,
        "z": list(joint.z) if joint.z is not None else None,
        "effects": _effects_doc(joint),
        "verification": {"marginal_residual": rep.marginal_residual,
                         "completeness_residual": rep.completeness_residual,
                         "min_positivity": rep.min_positivity,
                         "passed": rep.passed},
    })


@main.command()
@click.option("--x", "x", type=float, required=True)
@click.option("--m", "m", type=float, required=True, help="sharpness of A, taken along the x-axis")
@click.option("--y", "y", type=float, required=True)
@click.option("--angles", type=int, default=181, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--criterion", type=click.Choice(sorted(CRITERIA)), default="thm1", show_default=True)
def boundary(x: float, m: float, y: float, angles: int, tol: float, criterion: str) -> None:
    """Largest admissible sharpness of B per angle to the A vector."""
    if angles < 2 or tol <= 0 or m < 0:
        raise InputError("need angles >= 2, tol > 0, m >= 0")
    try:
        scan = boundary_scan(x, (m, 0.0, 0.0), y, angles, tol, criterion)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    lines = ["theta,n_max"] + [f"{_g(t)},{_g(n)}" for t, n in scan.samples]
    click.echo("\n".join(lines))


@main.command()
@click.option("--x", "x", type=float, required=True)
@click.option("--y", "y", type=float, required=True)
@click.option("--costheta", type=float, required=True)
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
def tradeoff(x: float, y: float, costheta: float, points: int, tol: float) -> None:
    """Trade-off between the two sharpnesses at fixed biases and angle."""
    if points < 2 or tol <= 0:
        raise InputError("need points >= 2 and tol > 0")
    try:
        curve = tradeoff_curve(x, y, costheta, points, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    lines = ["m,n_max"] + [f"{_g(mm)},{_g(n)}" for mm, n in curve.samples]
    lines.append(f"m0={_g(curve.m0)}")
    click.echo("\n".join(lines))


@main.command()
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--oracle-samples", type=int, default=0, show_default=True)
@click.option("--grid", type=float, default=2e-3, show_default=True)
def fuzz(samples: int, seed: int, tol: float, oracle_samples: int, grid: float) -> None:
    """Cross-check the criteria, constructions and oracle on random pairs."""
    if samples <= 0 or oracle_samples < 0 or grid <= 0 or seed < 0:
        raise InputError("need samples > 0, oracle-samples >= 0, grid > 0, seed >= 0")
    summary = run_fuzz(samples, seed, tol, oracle_samples=oracle_samples, grid=grid)
    _emit(summary.as_dict())
    sys.exit(EXIT_OK if summary.ok else EXIT_VIOLATION)


@main.command()
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--threshold", type=float, default=1e-10, show_default=True)
def identities(samples: int, seed: int, threshold: float) -> None:
    """Maximum scaled residual of each algebraic identity."""
    if samples <= 0 or seed < 0:
        raise InputError("need samples > 0 and seed >= 0")
    rows = run_identities(samples, seed, threshold)
    lines = ["identity,max_residual,pass"] + [f"{k},{_g(v)},{str(ok).lower()}" for k, v, ok in rows]
    click.echo("\n".join(lines))
    sys.exit(EXIT_OK if all(ok for _, _, ok in rows) else EXIT_VIOLATION)


def _state(text: str):
    try:
        r = [float(c) for c in text.split(",")]
        if len(r) != 3:
            raise ValueError("state needs three components")
        return qubit_state(r)
    except ValueError as exc:
        raise InputError(f"bad state {text!r}: {exc}") from exc


@main.command()
@click.argument("pairfile", type=click.Path())
@click.option("--state", "state_text", default="0,0,0", show_default=True, help="Bloch vector x,y,z")
@click.option("--n", "count", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
def simulate(pairfile: str, state_text: str, count: int, seed: int, tol: float) -> None:
    """Sample the joint observable and test its empirical marginals."""
    a, b = load_pair(pairfile)
    state = _state(state_text)
    if count < 0 or seed < 0:
        raise InputError("need n >= 0 and seed >= 0")
    try:
        joint = construct_joint(a, b, tol)
    except Incompatible as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_INCOMPATIBLE)
    counts = sample_outcomes(joint, state, count, seed)
    rep = empirical_marginal_check(counts, a, b, state, threshold=SIM_THRESHOLD)
    _emit({
        "case": joint.case,
        "counts": {f"{mu:+d}{nu:+d}": c for (mu, nu), c in counts.items()},
        "frequencies": rep.frequencies,
        "expected": rep.expected,
        "z_scores": rep.z_scores,
        "max_abs_z": rep.max_abs_z,
        "passed": rep.passed,
    })
    sys.exit(EXIT_OK if rep.passed else EXIT_VIOLATION)


if __name__ == "__main__":
    main()
