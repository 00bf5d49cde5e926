"""Spectrum of -Delta, Rayleigh quotients and Dirichlet eigenvalues.

-Delta is self-adjoint for the mu-weighted inner product, so its eigenpairs
solve the symmetric generalized problem L u = lambda M u with L the
stiffness matrix (diag mu, off-diagonal -w) and M = diag(mu).  Since M is
diagonal this reduces to an ordinary symmetric problem for
M^{-1/2} L M^{-1/2}, which is handed to LAPACK through ``numpy.linalg.eigh``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .calculus import dirichlet_energy, grad_norm_sq, integrate, laplacian
from .errors import ConvergenceError, PreconditionError
from .graph import as_vertex_function

RESIDUAL_TOL = 1e-10
CLUSTER_GAP = 1e-9
MAX_DENSE = 2000


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue of -Delta with a mu-normalised eigenfunction.

    ``cluster`` groups numerically degenerate eigenvalues (gap < 1e-9);
    inside a cluster the individual vectors depend on the LAPACK basis.
    """

    lam: float
    u: np.ndarray
    residual: float
    cluster: int = 0

    def to_dict(self, vertices=None):
        fn = self.u.tolist() if vertices is None else dict(zip(vertices, self.u.tolist()))
        return {
            "lambda": self.lam,
            "residual": self.residual,
            "cluster": self.cluster,
            "function": fn,
        }


def _fix_sign(vecs):
    # deterministic orientation: largest-magnitude entry (first on ties) positive
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        amax = np.max(np.abs(col))
        i = int(np.flatnonzero(np.abs(col) >= amax * (1 - 1e-12))[0])
        if col[i] < 0:
            vecs[:, k] = -col
    return vecs


def _clusters(lams):
    ids = np.zeros(len(lams), dtype=int)
    for k in range(1, len(lams)):
        ids[k] = ids[k - 1] + (lams[k] - lams[k - 1] >= CLUSTER_GAP)
    return ids


def _generalized_eigh(L, mu):
    if L.shape[0] > MAX_DENSE:
        raise PreconditionError(f"dense eigensolver limited to n <= {MAX_DENSE}, got {L.shape[0]}")
    s = 1.0 / np.sqrt(mu)
    sym = L * s[:, None] * s[None, :]
    sym = 0.5 * (sym + sym.T)
    try:
        lams, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from None
    lams = np.where(np.abs(lams) < 1e-12, 0.0, lams)
    return lams, _fix_sign(vecs * s[:, None])


def spectrum(g, tol=RESIDUAL_TOL):
    """All n eigenpairs of -Delta in ascending order.

    Eigenfunctions are mu-orthonormal: int u_i u_j dmu = delta_ij.

    Raises
    ------
    ConvergenceError
        If LAPACK fails or some eigenpair has residual max|-Delta u - lam u| >= tol.
    """
    lams, vecs = _generalized_eigh(np.asarray(g.stiffness), g.mu)
    ids = _clusters(lams)
    pairs = []
    for k, lam in enumerate(lams):
        u = np.ascontiguousarray(vecs[:, k])
        res = float(np.max(np.abs(-laplacian(g, u) - lam * u)))
        if not res < tol:
            raise ConvergenceError(f"eigenpair {k} has residual {res:.3e} >= {tol:.1e}", residual=res)
        pairs.append(EigenPair(float(lam), u, res, int(ids[k])))
    return pairs


def eigenvalues(g):
    return np.array([p.lam for p in spectrum(g)])


def lambda1(g):
    """First nonzero eigenvalue of -Delta (g is connected, so index 1)."""
    return spectrum(g)[1].lam


def rayleigh_quotient(g, u, convention="dirichlet"):
    """Rayleigh quotient of a mean-zero function.

    ``"dirichlet"`` returns E(u) / int u^2 dmu, whose infimum over mean-zero u
    is the operator eigenvalue lambda_1.  ``"grad_sq"`` returns
    int |grad u|^2 dmu / int u^2 dmu, which is exactly twice that.
    """
    u = as_vertex_function(g, u)
    mass = integrate(g, u * u)
    if mass == 0.0:
        raise PreconditionError("Rayleigh quotient of the zero function")
    if abs(integrate(g, u)) > 1e-10 * np.sqrt(mass * g.total_volume()):
        raise PreconditionError(f"u is not mu-mean-zero (int u dmu = {integrate(g, u)!r})")
    if convention == "dirichlet":
        return dirichlet_energy(g, u) / mass
    if convention == "grad_sq":
        return integrate(g, grad_norm_sq(g, u)) / mass
    raise PreconditionError(f"unknown convention {convention!r}; use 'dirichlet' or 'grad_sq'")


def dirichlet_spectrum(g, prob, tol=RESIDUAL_TOL):
    """Eigenpairs of -Delta on functions vanishing outside ``prob.interior``.

    Only interior rows and columns of L and M are kept; mu comes from the
    ambient graph.  Returned functions are zero off the interior and the
    residual is measured on interior vertices.
    """
    idx = np.asarray(prob.interior, dtype=np.int64)
    if idx.size == 0:
        raise PreconditionError("Dirichlet interior must be nonempty")
    L = np.asarray(g.stiffness)[np.ix_(idx, idx)]
    lams, vecs = _generalized_eigh(L, g.mu[idx])
    ids = _clusters(lams)
    pairs = []
    for k, lam in enumerate(lams):
        u = np.zeros(g.n)
        u[idx] = vecs[:, k]
        res = float(np.max(np.abs((-laplacian(g, u) - lam * u)[idx])))
        if not res < tol:
            raise ConvergenceError(f"Dirichlet eigenpair {k} has residual {res:.3e}", residual=res)
        pairs.append(EigenPair(float(lam), u, res, int(ids[k])))
    return pairs


def dirichlet_lambda1(g, prob):
    """Smallest Dirichlet eigenvalue lambda_1(Omega) of -Delta."""
    if not prob.boundary:
        warnings.warn("no boundary; Dirichlet = Neumann", stacklevel=2)
        if len(prob.interior) == g.n:
            return 0.0
    return dirichlet_spectrum(g, prob)[0].lam
