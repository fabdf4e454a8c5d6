"""Outcome statistics of a joint observable on a qubit state."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .construction import JointObservable
from .core import SIGN_PAIRS, SIGNS, SimpleObservable, Vec3, vec

Outcome = Tuple[int, int]


@dataclass(frozen=True)
class QubitState:
    """Density operator ``(I + r . sigma) / 2``."""

    r: Vec3

    def __post_init__(self):
        if self.r.norm() > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector {self.r} lies outside the unit ball")


def qubit_state(r) -> QubitState:
    return QubitState(vec(r))


def outcome_probabilities(joint: JointObservable, state: QubitState) -> Dict[Outcome, float]:
    """``tr(rho M) = c0 + c . r`` for each of the four effects."""
    return {k: e.c0 + e.c.dot(state.r) for k, e in joint.effects.items()}


def sample_outcomes(joint: JointObservable, state: QubitState, n: int, seed: int) -> Dict[Outcome, int]:
    probs = outcome_probabilities(joint, state)
    p = np.clip(np.array([probs[k] for k in SIGN_PAIRS]), 0.0, None)
    p = p / p.sum()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    counts = rng.multinomial(n, p)
    return {k: int(c) for k, c in zip(SIGN_PAIRS, counts)}


def marginal_probability(obs: SimpleObservable, sign: int, state: QubitState) -> float:
    return (1.0 + sign * obs.x + sign * obs.m.dot(state.r)) / 2.0


def _zscore(k: int, n: int, p: float) -> float:
    var = n * p * (1.0 - p)
    if var <= 0.0:
        return 0.0 if k == round(n * p) else math.inf
    return (k - n * p) / math.sqrt(var)


@dataclass(frozen=True)
class MarginalReport:
    n: int
    frequencies: Dict[str, float]
    expected: Dict[str, float]
    z_scores: Dict[str, float]
    threshold: float

    @property
    def max_abs_z(self) -> float:
        return max(abs(z) for z in self.z_scores.values())

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold


def empirical_marginal_check(counts: Dict[Outcome, int], obs_a: SimpleObservable,
                             obs_b: SimpleObservable, state: QubitState,
                             threshold: float = 4.0) -> MarginalReport:
    n = sum(counts.values())
    freqs, expected, zs = {}, {}, {}
    for s in SIGNS:
        label = "+" if s > 0 else "-"
        for name, obs, k in (
            ("A", obs_a, counts[s, 1] + counts[s, -1]),
            ("B", obs_b, counts[1, s] + counts[-1, s]),
        ):
            p = marginal_probability(obs, s, state)
            key = f"{name}{label}"
            freqs[key] = k / n if n else 0.0
            expected[key] = p
            zs[key] = _zscore(k, n, p)
    return MarginalReport(n, freqs, expected, zs, threshold)
