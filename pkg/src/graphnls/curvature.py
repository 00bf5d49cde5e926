"""Curvature-dimension condition CD(m, xi) on a finite weighted graph.

At each vertex x the defect

    Gamma_2(u,u)(x) - (1/m) (Delta u(x))^2 - xi Gamma(u,u)(x)

is a quadratic form in the values of u on the 2-ball around x.  CD(m, xi)
holds iff every such form is positive semidefinite, so the "for every u"
quantifier is decided exactly by a small symmetric eigenvalue problem per
vertex.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import PreconditionError

PSD_TOL = 1e-10
XI_TOL = 1e-8


@dataclass(frozen=True)
class LocalForms:
    """Pieces of the CD defect at one vertex, restricted to its 2-ball.

    The defect matrix is ``gamma2 - (1/m) outer(lap, lap) - xi * gamma``.
    """

    vertex: int
    ball: np.ndarray
    gamma2: np.ndarray
    gamma: np.ndarray
    lap: np.ndarray

    def matrix(self, m, xi):
        return self.gamma2 - np.outer(self.lap, self.lap) / m - xi * self.gamma

    def min_eig(self, m, xi):
        q = self.matrix(m, xi)
        w, v = np.linalg.eigh(0.5 * (q + q.T))
        return float(w[0]), v[:, 0]


@dataclass
class CDCertificate:
    m: float
    xi: float
    per_vertex_min_eig: dict
    holds: bool
    witness: dict = field(default=None)

    def to_dict(self):
        return {
            "m": self.m,
            "xi": self.xi,
            "holds": self.holds,
            "per_vertex_min_eig": self.per_vertex_min_eig,
            "witness": self.witness,
        }


def _check_m(m):
    if not m > 1:
        raise PreconditionError(f"CD dimension m must be > 1, got {m}")


def local_forms(g, x):
    """Assemble the Gamma_2, Gamma and Laplacian-row forms at vertex index ``x``.

    The forms are assembled on all of V; entries outside the 2-ball of x
    must vanish, which is asserted before restricting to the ball.
    """
    g2, gm, row = _kernels.local_forms(g.indptr, g.indices, g.weights, g.mu, int(x))
    ball = g.ball(int(x), 2)
    outside = np.ones(g.n, dtype=bool)
    outside[ball] = False
    assert not np.any(g2[outside]) and not np.any(g2[:, outside]), "Gamma_2 form leaks past 2-ball"
    assert not np.any(gm[outside]) and not np.any(row[outside]), "Gamma form leaks past 2-ball"
    sub = np.ix_(ball, ball)
    return LocalForms(int(x), ball, g2[sub], gm[sub], row[ball])


def local_cd_form(g, x, m, xi):
    """Matrix Q_x with u^T Q_x u = Gamma_2 - (1/m)(Delta u)^2 - xi Gamma at x.

    Returns
    -------
    ball : ndarray of int
        Vertex indices of the 2-ball of ``x`` indexing the rows of ``Q``.
    Q : ndarray
        Symmetric matrix on the ball.
    """
    _check_m(m)
    lf = local_forms(g, g.index(x) if isinstance(x, str) else x)
    return lf.ball, lf.matrix(m, xi)


def all_local_forms(g):
    return [local_forms(g, x) for x in range(g.n)]


def _certificate(g, forms, m, xi):
    mins = {}
    worst = None
    for lf in forms:
        lam, vec = lf.min_eig(m, xi)
        label = g.vertices[lf.vertex]
        mins[label] = lam
        if worst is None or lam < worst[0]:
            worst = (lam, lf, vec)
    holds = all(v >= -PSD_TOL for v in mins.values())
    witness = None
    if not holds:
        lam, lf, vec = worst
        witness = {
            "vertex": g.vertices[lf.vertex],
            "min_eig": lam,
            "function": {g.vertices[i]: float(c) for i, c in zip(lf.ball, vec)},
        }
    return CDCertificate(float(m), float(xi), mins, holds, witness)


def verify_cd(g, m, xi, forms=None):
    """Decide CD(m, xi) exactly by per-vertex PSD checks.

    ``forms`` may carry precomputed :func:`all_local_forms` output.
    """
    _check_m(m)
    if forms is None:
        forms = all_local_forms(g)
    return _certificate(g, forms, m, xi)


def _holds(forms, m, xi):
    return all(lf.min_eig(m, xi)[0] >= -PSD_TOL for lf in forms)


def best_xi(g, m, tol=XI_TOL, forms=None):
    """Largest xi (to ``tol``) with CD(m, xi), by bisection.

    The defect decreases in xi because the Gamma form is PSD, so the set of
    admissible xi is an interval (-inf, xi*].  The returned value is the
    lower end of the final bracket, so CD(m, best_xi) is certified.
    """
    _check_m(m)
    if forms is None:
        forms = all_local_forms(g)
    scale = max(float(np.linalg.eigvalsh(lf.matrix(m, 0.0))[-1]) for lf in forms)
    lo = -(2.0 * abs(scale) + 1.0)
    while not _holds(forms, m, lo):
        lo = 2.0 * lo
    hi = 10.0
    while _holds(forms, m, hi):
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _holds(forms, m, mid):
            lo = mid
        else:
            hi = mid
    return lo


def lin_yau_certificate(g):
    """Universal CD(2, 2/d - 1) bound with d = max mu(x)/w_xy."""
    return 2.0, 2.0 / g.sup_degree_ratio() - 1.0
