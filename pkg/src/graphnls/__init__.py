"""Calculus, curvature and a mountain-pass solver on weighted finite graphs."""

from ._kernels import BACKEND
from .calculus import (
    dirichlet_energy,
    gamma,
    gamma2,
    grad_norm,
    grad_norm_sq,
    integrate,
    laplacian,
    mean,
    norm,
    project_mean_zero,
)
from .curvature import best_xi, lin_yau_certificate, local_cd_form, verify_cd
from .errors import GraphNLSError, NumericalError, ValidationError
from .graph import VertexSubsetProblem, WeightedGraph, load_graph
from .inequalities import (
    alpha_star,
    check_lambda_bound,
    check_theorem2,
    improvement_regime,
    norm_equivalence,
    sobolev_constant,
    tm_functional,
    tm_sup_estimate,
)
from .nls import (
    Power,
    check_hypotheses,
    functional_J,
    gradient_J,
    mountain_pass_solve,
    newton_refine,
    verify_solution,
)
from .spectral import EigenPair, dirichlet_lambda1, dirichlet_spectrum, lambda1, rayleigh_quotient, spectrum

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EigenPair",
    "GraphNLSError",
    "NumericalError",
    "Power",
    "ValidationError",
    "VertexSubsetProblem",
    "WeightedGraph",
    "alpha_star",
    "best_xi",
    "check_hypotheses",
    "check_lambda_bound",
    "check_theorem2",
    "dirichlet_energy",
    "dirichlet_lambda1",
    "dirichlet_spectrum",
    "functional_J",
    "gamma",
    "gamma2",
    "grad_norm",
    "grad_norm_sq",
    "gradient_J",
    "improvement_regime",
    "integrate",
    "lambda1",
    "laplacian",
    "lin_yau_certificate",
    "load_graph",
    "local_cd_form",
    "mean",
    "mountain_pass_solve",
    "newton_refine",
    "norm",
    "norm_equivalence",
    "project_mean_zero",
    "rayleigh_quotient",
    "sobolev_constant",
    "spectrum",
    "tm_functional",
    "tm_sup_estimate",
    "verify_cd",
    "verify_solution",
]
