"""Numerical laboratory for self-similar blow-up in axisymmetric Euler flow with swirl.

Subpackages and modules:

* :mod:`euler_lab.fields` - grids, fields, states, self-similar parameters and coordinate maps
* :mod:`euler_lab.elliptic` - the stream-function solve and velocity recovery
* :mod:`euler_lab.solver` - RK4 time integration of the transformed system
* :mod:`euler_lab.selfsim` - profile sets, exact families, residuals, reconstruction, classification
* :mod:`euler_lab.diagnostics` - physical fields, BKM estimates, power-law fits, decay probe
* :mod:`euler_lab.cli` - the ``euler-lab`` command
"""

from euler_lab.fields import (
    DomainError,
    GridSpec,
    ScalarField2D,
    ScalingExponents,
    SelfSimilarParams,
    State,
    constantin_admissible,
    from_selfsimilar,
    in_window,
    scaling_exponents,
    to_selfsimilar,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "GridSpec",
    "ScalarField2D",
    "ScalingExponents",
    "SelfSimilarParams",
    "State",
    "constantin_admissible",
    "from_selfsimilar",
    "in_window",
    "scaling_exponents",
    "to_selfsimilar",
]
