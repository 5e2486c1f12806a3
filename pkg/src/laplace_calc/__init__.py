"""Numerical Laplace derivatives and integrals.

Modules: ``quadrature`` (adaptive Gauss-Kronrod), ``laplace_deriv`` (one-sided
Laplace limits), ``svc_pathology`` (a Laplace differentiable function that is
nowhere differentiable on a fat Cantor set), ``calculus`` (FTC, Alexiewicz
norm, parts, Hake, mean values, Taylor), ``poisson`` (disc extension of
boundary data) and ``gen_ode`` (Picard iteration).
"""

from .calculus import (AlexiewiczNorm, Primitive, TaylorResult, alexiewicz_norm,
                       ftc_integral, hake_limit, integrate_by_parts, ld1_integral,
                       mean_value_xi_first, mean_value_xi_second, primitive_of, taylor)
from .errors import *  # noqa: F401,F403
from .gen_ode import (IvpSystem, PicardSolution, contraction_step, picard_solve,
                      reduce_higher_order, system_from_catalog)
from .laplace_deriv import (Classification, LimitEstimate, SGrid, classify, derivates,
                            increment_transform, is_laplace_continuous, ld0, ld1)
from .poisson import (DiscFunction, boundary_convergence, harmonicity_residual,
                      kernel_antiderivative, poisson_integral, poisson_kernel)
from .quadrature import QuadratureResult, RealFunction, cumulative_integral, integrate
from .svc_pathology import (PathologicalFunction, SvcModel, build_svc, certified_points,
                            difference_quotients, eval_f, locate, witness_pair)

__version__ = "0.1.0"
