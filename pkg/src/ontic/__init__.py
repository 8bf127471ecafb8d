"""Ontological (hidden-variable) models of finite-dimensional quantum states.

The package builds concrete ontological theories (a psi-ontic baseline, the
Kochen-Specker qubit model, mixing pair theories, convex combinations and a
truncated maximally nontrivial net theory) and checks their defining
properties numerically: Born-rule reproduction, outcome normalization and
overlap structure.  The :mod:`ontic.nogo` module certifies the explicit
geometric objects used in impossibility arguments for symmetric theories.
"""

from ontic.qstate import (
    OrthoBasis,
    ProjState,
    UnitaryOp,
    epsilon_net,
    fs_distance,
    gram_schmidt,
    haar_basis,
    haar_state,
    inner,
)
from ontic.measures import FiberComponent, FiberedMeasure, overlap_mass, total_variation
from ontic.theory import OnticBatch, OnticPoint, Theory, verify_born, verify_normalization
from ontic.models import (
    ConvexTheory,
    KSTheory,
    NetTheory,
    PairTheory,
    convex_combine,
    ks2d,
    net_theory,
    psi_ontic,
)

__version__ = "0.1.0"

__all__ = [
    "ConvexTheory",
    "FiberComponent",
    "FiberedMeasure",
    "KSTheory",
    "NetTheory",
    "OnticBatch",
    "OnticPoint",
    "OrthoBasis",
    "PairTheory",
    "ProjState",
    "Theory",
    "UnitaryOp",
    "convex_combine",
    "epsilon_net",
    "fs_distance",
    "gram_schmidt",
    "haar_basis",
    "haar_state",
    "inner",
    "ks2d",
    "net_theory",
    "overlap_mass",
    "psi_ontic",
    "total_variation",
    "verify_born",
    "verify_normalization",
]
