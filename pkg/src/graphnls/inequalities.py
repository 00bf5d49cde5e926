"""Executable checks of the eigenvalue and integral inequalities.

Covers the Lichnerowicz-type bound lambda >= m xi/(m-1), the integral
inequality 2 lam^2/(m (lam - xi)) int u^2 <= int |grad u|^2 for
eigenfunctions, the equivalence of the alpha-norm with the W^{1,2}
seminorm, the Trudinger-Moser functional and its supremum, and Sobolev
embedding constants.

Every supremum is taken over mu-mean-zero functions: the W^{1,p}
seminorm vanishes on constants, and the suprema are infinite otherwise.
"""

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _ascent
from .calculus import grad_norm_sq, integrate
from .curvature import verify_cd
from .errors import IndefiniteFormError, MagnitudeOverflowError, PreconditionError
from .graph import as_vertex_function
from .spectral import spectrum

EXP_LIMIT = 700.0
DEFAULT_STARTS = 16


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    inputs: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _report(name, lhs, rhs, **inputs):
    slack = rhs - lhs
    holds = slack >= -1e-10 * max(1.0, abs(rhs))
    return InequalityReport(name, float(lhs), float(rhs), float(slack), bool(holds), inputs)


def _check_m(m):
    if not m > 1:
        raise PreconditionError(f"m must be > 1, got {m}")


def check_lambda_bound(lam, m, xi):
    """Report on lambda >= m xi / (m - 1) for a nonzero eigenvalue."""
    _check_m(m)
    if lam == 0:
        raise PreconditionError("the eigenvalue bound concerns nonzero eigenvalues; got lambda = 0")
    return _report("lambda-bound", m * xi / (m - 1.0), lam, **{"lambda": lam, "m": m, "xi": xi})


def alpha_star(lam, m, xi):
    """Threshold 2 lam^2 / (m (lam - xi)) for the shift alpha."""
    _check_m(m)
    if not lam > xi:
        raise PreconditionError(f"denominator sign: need lambda > xi, got lambda={lam}, xi={xi}")
    return 2.0 * lam * lam / (m * (lam - xi))


def improvement_regime(lam1, m, xi):
    """Compare alpha* with lambda_1.

    ``improves`` is alpha* > lambda_1; ``in_window`` evaluates
    m xi/(m-1) <= lambda_1 < m xi/(m-2) (the upper end is +inf for m <= 2
    when xi > 0).
    """
    a = alpha_star(lam1, m, xi)
    lower = m * xi / (m - 1.0)
    if m > 2:
        upper = m * xi / (m - 2.0)
    else:
        upper = np.inf if xi > 0 else -np.inf
    return {
        "alpha_star": a,
        "lambda1": lam1,
        "improves": bool(a > lam1),
        "in_window": bool(lower <= lam1 < upper),
        "window": [lower, float(upper)],
    }


def check_theorem2(g, pair, m, xi, certify=True):
    """Integral inequality for an eigenpair of -Delta under CD(m, xi).

    lhs = 2 lam^2/(m (lam - xi)) int u^2 dmu, rhs = int |grad u|^2 dmu with
    |grad u|^2 = 2 Gamma(u, u).  When ``certify`` is set, whether CD(m, xi)
    actually holds on ``g`` is computed and echoed as ``cd_holds``.
    """
    _check_m(m)
    lam = pair.lam
    if lam == 0:
        raise PreconditionError("eigenvalue must be nonzero")
    if not lam > xi:
        raise PreconditionError(f"denominator sign: need lambda > xi, got lambda={lam}, xi={xi}")
    u = pair.u
    lhs = 2.0 * lam * lam / (m * (lam - xi)) * integrate(g, u * u)
    rhs = integrate(g, grad_norm_sq(g, u))
    inputs = {"lambda": lam, "m": m, "xi": xi}
    if certify:
        inputs["cd_holds"] = verify_cd(g, m, xi).holds
    return _report("theorem2", lhs, rhs, **inputs)


def norm_equivalence(g, alpha, m=None, xi=None):
    """Exact equivalence constants between ||u||_alpha^2 and ||u||_{W^{1,2}}^2.

    On mean-zero functions the ratio is a generalised Rayleigh quotient whose
    extremes are 1 - alpha/(2 lambda_k) over the nonzero eigenvalues.

    Returns
    -------
    (c1, c2) : tuple of float
        c1 ||u||_{W^{1,2}}^2 <= ||u||_alpha^2 <= c2 ||u||_{W^{1,2}}^2.

    Raises
    ------
    IndefiniteFormError
        If c1 <= 0, i.e. alpha >= 2 lambda_1.
    """
    lams = np.array([p.lam for p in spectrum(g)[1:]])
    ratios = 1.0 - alpha / (2.0 * lams)
    c1, c2 = float(ratios.min()), float(ratios.max())
    if c1 <= 1e-12:
        raise IndefiniteFormError(
            f"alpha-form indefinite on mean-zero subspace: min ratio {c1!r} "
            f"(alpha={alpha}, 2*lambda_1={float(2 * lams[0])!r})",
            value=c1,
        )
    if m is not None and xi is not None and lams[0] > xi and alpha >= alpha_star(lams[0], m, xi):
        warnings.warn(f"alpha={alpha} is not below alpha*={alpha_star(lams[0], m, xi)}", stacklevel=2)
    return c1, c2


# ------------------------------------------------------ Trudinger-Moser


def _tm_check_range(beta, p):
    if not (beta > 1 and p > 2):
        warnings.warn(f"beta={beta}, p={p} outside beta > 1, p > 2", stacklevel=3)


def _tm_exponent(g, u, beta, p):
    r = p / (p - 1.0)
    e = beta * np.abs(u) ** r
    big = np.flatnonzero(e > EXP_LIMIT)
    if big.size:
        v = g.vertices[int(big[0])]
        raise MagnitudeOverflowError(
            f"magnitude overflow: beta|u|^(p/(p-1)) = {e[big[0]]:.4g} > {EXP_LIMIT} at vertex {v!r}",
            vertex=v,
        )
    return e, r


def tm_functional(g, u, beta, p):
    """int_V exp(beta |u|^(p/(p-1))) dmu."""
    u = as_vertex_function(g, u)
    _tm_check_range(beta, p)
    e, _ = _tm_exponent(g, u, beta, p)
    return float(np.dot(g.mu, np.exp(e)))


@dataclass
class TMEstimate:
    beta: float
    p: float
    empirical_sup: float
    maximizer: np.ndarray
    theoretical_bound: float
    C0: float
    converged: bool
    volume: float
    log_bound: float

    def to_dict(self, vertices=None):
        d = asdict(self)
        d["maximizer"] = (
            self.maximizer.tolist() if vertices is None else dict(zip(vertices, self.maximizer.tolist()))
        )
        d["bound_dominates"] = bool(self.empirical_sup <= self.theoretical_bound)
        return d


def tm_sup_estimate(g, beta, p, starts=DEFAULT_STARTS, seed=0, step=0.1, max_iter=5000):
    """Maximise the Trudinger-Moser functional over the mean-zero W^{1,p} unit sphere.

    The bound reported next to the empirical supremum is C |V| with
    C = exp(beta C0 / mu_min)^(p/(p-1)) and C0 the best constant of the
    W^{1,p} -> L^{p/(p-1)} embedding on mean-zero functions.
    """
    _tm_check_range(beta, p)
    sphere = _ascent.SobolevSphere(g, p)

    def obj(u):
        e, _ = _tm_exponent(g, u, beta, p)
        return float(np.dot(g.mu, np.exp(e)))

    def grad(u):
        e, r = _tm_exponent(g, u, beta, p)
        return g.mu * np.exp(e) * beta * r * np.abs(u) ** (r - 1.0) * np.sign(u)

    best, runs = _ascent.multistart(sphere, obj, grad, starts, seed, step=step, max_iter=max_iter)
    c0 = sobolev_constant(g, p, p / (p - 1.0), starts=starts, seed=seed)
    vol = g.total_volume()
    log_c = beta * c0 / float(np.min(g.mu)) * p / (p - 1.0)
    log_bound = log_c + np.log(vol)
    bound = float(np.exp(log_bound)) if log_bound < EXP_LIMIT else float("inf")
    if not best.converged:
        warnings.warn("Trudinger-Moser ascent not converged; reporting best value found", stacklevel=2)
    return TMEstimate(
        beta=float(beta),
        p=float(p),
        empirical_sup=best.value,
        maximizer=best.u,
        theoretical_bound=bound,
        C0=c0,
        converged=best.converged,
        volume=vol,
        log_bound=float(log_bound),
    )


# -------------------------------------------------------------- Sobolev


def sobolev_search(g, s, q, starts=DEFAULT_STARTS, seed=0, max_iter=5000):
    """Best ratio ||u||_q / ||u||_{W^{1,s}} over mean-zero u, with its maximiser.

    ``q = inf`` selects the sup norm.  For the sup norm each vertex is
    handled separately: maximising u(x) over the (strictly convex) unit ball
    is a concave problem, so one ascent per vertex finds the global value.

    Returns
    -------
    value : float
    u : ndarray
        Maximiser on the unit sphere.
    converged : bool
    """
    if not s > 1:
        raise PreconditionError(f"Sobolev exponent s must be > 1, got {s}")
    if not q >= 1:
        raise PreconditionError(f"target exponent q must be >= 1, got {q}")
    sphere = _ascent.SobolevSphere(g, s)
    if np.isinf(q):
        best = None
        ok = True
        for x in range(g.n):
            e = np.zeros(g.n)
            e[x] = 1.0

            def obj(u, x=x):
                return float(u[x])

            def grad(u, e=e):
                return e

            res = _ascent.ascend(sphere, obj, grad, e, max_iter=max_iter)
            ok = ok and res.converged
            if best is None or res.value > best.value:
                best = res
        return best.value, best.u, ok

    def obj(u):
        return float(np.dot(g.mu, np.abs(u) ** q))

    def grad(u):
        return g.mu * q * np.abs(u) ** (q - 1.0) * np.sign(u)

    best, _ = _ascent.multistart(sphere, obj, grad, starts, seed, max_iter=max_iter)
    return best.value ** (1.0 / q), best.u, best.converged


def sobolev_constant(g, s, q, starts=DEFAULT_STARTS, seed=0):
    """sup over mean-zero u != 0 of ||u||_{L^q} / ||u||_{W^{1,s}}."""
    return sobolev_search(g, s, q, starts=starts, seed=seed)[0]
