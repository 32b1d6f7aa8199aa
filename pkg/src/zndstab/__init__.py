"""zndstab: stability analysis of inviscid (ZND) detonation waves.

Closed-form profiles, Evans-Lopatinski determinants in one and two space
dimensions, argument-principle root atlases and neutral-boundary tracing,
semiclassical symbol analysis of the high-frequency limit, and a numerical
laboratory for oscillatory-integral/Riccati block-diagonalization questions.
"""

__version__ = "0.1.0"

from .params import ChemParams, ScalingClassical, q_cj
from .profile import ZNDProfile, algebraic_state, compute_profile, reaction_rhs
from .logpolar import EvansValue

__all__ = ["ChemParams", "ScalingClassical", "q_cj", "ZNDProfile",
           "algebraic_state", "compute_profile", "reaction_rhs", "EvansValue",
           "__version__"]
