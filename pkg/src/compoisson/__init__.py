"""COM-Poisson normalizing constant Z(lambda, nu) by several independent routes.

Evaluators: direct series (the reference), the inverse-Gamma single integral
(exact segment sum and black-box quadrature), the 0F_nu hypergeometric series
and the Shmueli multiple integral for integer nu.  ``compute_z`` dispatches by
name; ``distribution`` builds pmf/cdf/quantile/sampling on top.
"""

from .cahen import PiecewiseSegment, segments, z_cahen_exact, z_cahen_near_one, z_cahen_quad
from .compute import METHODS, compute_z
from .dirichlet import CahenSum, DirichletSeries, cahen_evaluate, compoisson_dirichlet, partial_sum
from .distribution import PmfTable, cdf, log_pmf, moments, pmf, quantile, sample
from .errors import (
    ComPoissonError,
    ConvergenceError,
    DiagnosticError,
    DomainError,
    GuardError,
    IterationCapError,
    TailPolicyError,
)
from .gamma import (
    GAMMA_MIN,
    GammaMinimum,
    digamma,
    floor_inverse_gamma,
    inverse_gamma,
    inverse_log_gamma,
    log_gamma,
)
from .params import LAMBDA_ONE_GUARD, ComPoissonParams, Method, QuadConfig, Rule, ZResult
from .series import z_series, z_series_direct, z_series_tail_bound
from .special import z_bessel_nu2, z_hypergeometric, z_shmueli

__version__ = "0.1.0"
