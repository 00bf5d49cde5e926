"""Projected gradient ascent on the unit sphere of the W^{1,s} seminorm.

The feasible set is {u : int u dmu = 0, ||u||_{W^{1,s}} = 1}.  On the
mu-mean-zero subspace of a connected graph the seminorm is a norm, so the
set is compact.  Each step moves along the tangential part of the
objective gradient and retracts by radial rescaling, with a backtracking
step length.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class AscentResult:
    value: float
    u: np.ndarray
    iterations: int
    converged: bool


class SobolevSphere:
    def __init__(self, g, s):
        self.g = g
        self.s = float(s)
        self.src = np.repeat(np.arange(g.n), np.diff(g.indptr))
        self.dst = g.indices
        self.w = g.weights
        self.mu = g.mu
        self._mu_sq = float(np.dot(g.mu, g.mu))

    def grad_sq(self, u):
        d = u[self.dst] - u[self.src]
        return np.bincount(self.src, weights=self.w * d * d, minlength=self.g.n) / self.mu

    def norm(self, u):
        return float(np.dot(self.mu, self.grad_sq(u) ** (0.5 * self.s)) ** (1.0 / self.s))

    def norm_power_grad(self, u):
        """Euclidean gradient of int |grad u|^s dmu."""
        gs = self.grad_sq(u)
        c = np.zeros_like(gs)
        pos = gs > 0
        c[pos] = gs[pos] ** (0.5 * self.s - 1.0)
        d = u[self.src] - u[self.dst]
        return self.s * np.bincount(
            self.src, weights=self.w * (c[self.src] + c[self.dst]) * d, minlength=self.g.n
        )

    def project(self, v):
        """Euclidean projection onto {v : sum_x mu(x) v(x) = 0}."""
        return v - (np.dot(self.mu, v) / self._mu_sq) * self.mu

    def retract(self, u):
        u = self.project(u)
        nrm = self.norm(u)
        if nrm == 0.0:
            return None
        return u / nrm

    def tangent(self, u, g):
        gp = self.project(g)
        nrm = self.project(self.norm_power_grad(u))
        nn = float(np.dot(nrm, nrm))
        if nn == 0.0:
            return gp, gp
        return gp - (np.dot(gp, nrm) / nn) * nrm, gp


def ascend(sphere, objective, gradient, u0, step=0.1, max_iter=5000, gtol=1e-9, ftol=1e-15):
    """Maximise ``objective`` over the sphere starting from ``u0``.

    Converged means the tangential gradient is below ``gtol`` relative to
    the full projected gradient, or that no step of any length in the
    tangent direction improves the objective beyond ``ftol`` relative.
    """
    u = sphere.retract(np.asarray(u0, dtype=np.float64))
    if u is None:
        raise ValueError("start point is constant; it has no mean-zero part")
    f = objective(u)
    t = step
    stalls = 0
    for it in range(1, max_iter + 1):
        d, gp = sphere.tangent(u, gradient(u))
        dn = float(np.linalg.norm(d))
        scale = float(np.linalg.norm(gp))
        if dn <= gtol * max(scale, 1e-300):
            return AscentResult(f, u, it - 1, True)
        dirn = d / dn
        unorm = float(np.linalg.norm(u))
        improved = False
        while t * dn > 1e-16 * unorm:
            cand = sphere.retract(u + t * dirn * unorm)
            if cand is not None:
                fc = objective(cand)
                if fc > f:
                    improved = True
                    break
            t *= 0.5
        if not improved:
            return AscentResult(f, u, it, True)
        gain = fc - f
        u, f = cand, fc
        t = min(2.0 * t, 1.0)
        stalls = stalls + 1 if gain <= ftol * max(abs(f), 1.0) else 0
        if stalls >= 20:
            return AscentResult(f, u, it, True)
    return AscentResult(f, u, max_iter, False)


def multistart(sphere, objective, gradient, starts, seed, **kw):
    """Best of ``starts`` ascents from seeded Gaussian starting points.

    Ties are broken by start order, so the result is reproducible.
    """
    rng = np.random.default_rng(seed)
    best = None
    runs = []
    for _ in range(starts):
        u0 = rng.standard_normal(sphere.g.n)
        if np.ptp(u0) == 0:
            continue
        res = ascend(sphere, objective, gradient, u0, **kw)
        runs.append(res)
        if best is None or res.value > best.value:
            best = res
    return best, runs
