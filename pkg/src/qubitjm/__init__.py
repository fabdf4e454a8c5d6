"""Joint measurability of pairs of unsharp two-outcome qubit observables."""
from .construction import (
    Case,
    ConstructionFailed,
    Incompatible,
    JointObservable,
    construct_joint,
    verify_joint,
)
from .core import (
    Effect,
    InvalidObservable,
    PairContext,
    SimpleObservable,
    Vec3,
    make_observable,
    pair_context,
)
from .criteria import CRITERIA, Decision, Verdict, all_verdicts, jm_bs, jm_srh, jm_thm1, jm_thm2

__version__ = "0.1.0"
