"""Numerical laboratory for radial solutions of the weighted planar Liouville equation.

The model problem is u'' + u'/r + (1 + r^2)^N e^{2u} = 0 with u(0) = a,
u'(0) = 0.  The package computes the shooting map a -> alpha(a) and its
linearization, critical-point portraits with the exact counting formula, the
cubic and second-variation diagnostics J_N and K_N, and the branches of
nontrivial solutions at mass level alpha = N + 2.
"""

__version__ = "0.1.0"

from .branches import (
    BranchArc,
    BranchPoint,
    KelvinPairingReport,
    continue_branch,
    count_at_level,
    detect_bifurcations,
    kelvin_pairing,
)
from .curves import (
    AlphaCurve,
    CriticalPortrait,
    SolutionCount,
    count_roots_direct,
    count_solutions,
    critical_portrait,
    estimate_N0,
    find_c_of_N,
    sweep_alpha,
)
from .ivp import IntegratorConfig, OdeSystem, Trajectory, integrate
from .legendre import (
    LegendrePoly,
    SpectralConstants,
    bifurcation_exponent,
    frak_N,
    gaunt_j,
    legendre,
    legendre_residual,
)
from .shooting import (
    RadialProfile,
    ShootingParams,
    SphereSolution,
    a_star,
    explicit_solution,
    kelvin_transform,
    shoot,
    sphere_lift,
)
from .variational import (
    LinearizedProfile,
    SecondVariationProfile,
    VariationalDiagnostics,
    alpha_prime,
    compute_J,
    compute_K,
    diagnostics,
    largest_zero_velocity,
    linearize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
