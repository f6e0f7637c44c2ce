"""Bifurcation analysis for one-dimensional nonlocal boundary blow-up problems.

The package reduces the nonlocal problem

    A(||u||_q1, ||u'||_r1) u'' = lambda B(||u||_q2, ||u'||_r2) u^p

with boundary blow-up on (-1, 1) to counting the roots of a scalar
equation, evaluates the canonical profile and its Lebesgue norms in closed
form, reconstructs solutions, sweeps the bifurcation parameter, and checks
every closed form against independent numerical oracles.  The exponential
nonlinearity variant (u^p replaced by e^u, coefficients depending on the
derivative norm only) is included.
"""

from .bifurcation import (
    BifurcationDiagram,
    CoefficientError,
    ProblemSpec,
    Root,
    SolveResult,
    Threshold,
    default_window,
    g_of_s,
    lift_quadruple,
    make_problem_spec,
    nonlocal_residual,
    reconstruct,
    solve_single,
    sweep,
    system_residual,
)
from .expcase import (
    ExpProblemSpec,
    ExpProfile,
    ExpSolution,
    eval_U_lambda,
    eval_U_lambda_prime,
    exp_prime_norm,
    make_exp_problem_spec,
    make_exp_profile,
    solve_exp,
)
from .exprdsl import CoeffExpr, EvalError, ParseError, eval_expr, parse, positivity_scan
from .norms import ExponentError, NormTable, make_norm_table, norm_U, norm_U_prime, validate_exponents
from .scenarios import Scenario, catalog, check_scenario, cor4_asymptotics, get_scenario
from .specfun import beta, log_gamma
from .timemap import (
    Profile,
    ProfileSample,
    eval_U,
    eval_U_prime,
    make_profile,
    ode_residual,
    sample_profile,
    time_map,
    time_map_inverse,
)

__version__ = "0.1.0"
