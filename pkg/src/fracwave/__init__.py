"""ADI orthogonal spline collocation for the 2D time-fractional diffusion-wave equation.

The solver discretizes ``D_t^alpha u = Laplace u + f`` (Caputo derivative,
1 < alpha < 2) on the unit square with piecewise Hermite bicubics collocated
at Gauss points, the L1 formula in time, and a Crank-Nicolson ADI splitting
that reduces every step to two sweeps of 1D almost block diagonal solves.
"""

from .caputo import L1Weights, build_weights, gamma, l1_caputo_apply
from .hermite import (
    CollocationMatrices,
    HermiteBasis1D,
    SplineCoeffs2D,
    assemble_matrices,
    eval_spline_2d,
    hermite_interpolant_2d,
)
from .mesh import CollocationGrid, GaussRule, Partition1D, collocation_grid, gauss_rule, uniform_partition
from .norms import (
    ErrorReport,
    convergence_rate,
    discrete_inner,
    hnorm_error,
    linf_error,
    measure,
    nodal_derivative_error,
)
from .problems import Problem, caputo_power, get_problem, paper_example, polynomial_problem
from .stepper import AdiOscSolver, SchemeConfig, SolverState, run

__version__ = "0.1.0"
