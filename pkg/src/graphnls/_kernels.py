"""Per-vertex inner loops over the CSR adjacency.

Every kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version with the same signature.  The module-level names (``laplacian``,
``gamma``, ...) point at the numba versions unless numba is missing or the
environment variable ``GRAPHNLS_DISABLE_NUMBA`` is set to a truthy value,
in which case the numpy versions are used.  Both variants are always
importable under their ``_nb`` / ``_np`` names so they can be compared.

Arguments are the CSR arrays of a :class:`~graphnls.graph.WeightedGraph`:
``indptr`` (n+1,), ``indices`` and ``weights`` (2|E|,) holding each
undirected edge in both directions, and the vertex measure ``mu`` (n,).
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


_FLAG = os.environ.get("GRAPHNLS_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numba


@njit(cache=True)
def _laplacian_nb(indptr, indices, weights, mu, u):
    n = mu.shape[0]
    out = np.empty(n)
    for x in range(n):
        s = 0.0
        ux = u[x]
        for k in range(indptr[x], indptr[x + 1]):
            s += weights[k] * (u[indices[k]] - ux)
        out[x] = s / mu[x]
    return out


@njit(cache=True)
def _gamma_nb(indptr, indices, weights, mu, u, v):
    n = mu.shape[0]
    out = np.empty(n)
    for x in range(n):
        s = 0.0
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            s += weights[k] * ((u[y] - u[x]) * (v[y] - v[x]))
        out[x] = s / (2.0 * mu[x])
    return out


@njit(cache=True)
def _gamma2_expanded_nb(indptr, indices, weights, mu, u):
    n = mu.shape[0]
    out = np.empty(n)
    for x in range(n):
        ux = u[x]
        t1 = 0.0
        t2 = 0.0
        t3 = 0.0
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            wxy = weights[k]
            uy = u[y]
            inner = 0.0
            for j in range(indptr[y], indptr[y + 1]):
                d = ux - 2.0 * uy + u[indices[j]]
                inner += weights[j] * d * d
            t1 += wxy / mu[y] * inner
            d = ux - uy
            t2 += wxy * d * d
            t3 += wxy * d
        t3 /= mu[x]
        out[x] = 0.25 * t1 / mu[x] - 0.5 * t2 / mu[x] + 0.5 * t3 * t3
    return out


@njit(cache=True)
def _local_forms_nb(indptr, indices, weights, mu, x):
    n = mu.shape[0]
    g2 = np.zeros((n, n))
    gm = np.zeros((n, n))
    row = np.zeros(n)
    idx = np.empty(3, dtype=np.int64)
    coef = np.array([1.0, -2.0, 1.0])
    mx = mu[x]
    for k in range(indptr[x], indptr[x + 1]):
        y = indices[k]
        wxy = weights[k]
        idx[0] = x
        idx[1] = y
        for j in range(indptr[y], indptr[y + 1]):
            idx[2] = indices[j]
            c = 0.25 * wxy * weights[j] / (mx * mu[y])
            for a in range(3):
                for b in range(3):
                    g2[idx[a], idx[b]] += c * coef[a] * coef[b]
        h = wxy / (2.0 * mx)
        gm[x, x] += h
        gm[y, y] += h
        gm[x, y] -= h
        gm[y, x] -= h
        row[y] += wxy / mx
        row[x] -= wxy / mx
    # Gamma_2 = T1 - Gamma + (1/2) (Delta)^2
    for a in range(n):
        for b in range(n):
            g2[a, b] += -gm[a, b] + 0.5 * row[a] * row[b]
    return g2, gm, row


# ---------------------------------------------------------------- numpy


def _sources(indptr):
    return np.repeat(np.arange(indptr.shape[0] - 1), np.diff(indptr))


def _laplacian_np(indptr, indices, weights, mu, u):
    src = _sources(indptr)
    n = mu.shape[0]
    return np.bincount(src, weights=weights * (u[indices] - u[src]), minlength=n) / mu


def _gamma_np(indptr, indices, weights, mu, u, v):
    src = _sources(indptr)
    n = mu.shape[0]
    prod = weights * ((u[indices] - u[src]) * (v[indices] - v[src]))
    return np.bincount(src, weights=prod, minlength=n) / (2.0 * mu)


def _two_paths(indptr, indices):
    """Enumerate directed 2-paths x -> y -> z as (edge id x->y, csr slot y->z)."""
    deg = np.diff(indptr)
    counts = deg[indices]
    edge = np.repeat(np.arange(indices.shape[0]), counts)
    start = np.cumsum(counts) - counts
    slot = np.arange(counts.sum()) - np.repeat(start, counts) + np.repeat(indptr[indices], counts)
    return edge, slot


def _gamma2_expanded_np(indptr, indices, weights, mu, u):
    n = mu.shape[0]
    src = _sources(indptr)
    edge, slot = _two_paths(indptr, indices)
    x, y, z = src[edge], indices[edge], indices[slot]
    d2 = u[x] - 2.0 * u[y] + u[z]
    t1 = np.bincount(x, weights=weights[edge] / mu[y] * weights[slot] * d2 * d2, minlength=n)
    d = u[src] - u[indices]
    t2 = np.bincount(src, weights=weights * d * d, minlength=n)
    t3 = np.bincount(src, weights=weights * d, minlength=n) / mu
    return 0.25 * t1 / mu - 0.5 * t2 / mu + 0.5 * t3 * t3


def _local_forms_np(indptr, indices, weights, mu, x):
    n = mu.shape[0]
    nbrs = indices[indptr[x]:indptr[x + 1]]
    wx = weights[indptr[x]:indptr[x + 1]]
    mx = mu[x]
    g2 = np.zeros((n, n))
    eye = np.eye(n)
    for y, wxy in zip(nbrs, wx):
        zs = indices[indptr[y]:indptr[y + 1]]
        wy = weights[indptr[y]:indptr[y + 1]]
        c = eye[x] - 2.0 * eye[y] + eye[zs]  # one row per z
        g2 += 0.25 * wxy / (mx * mu[y]) * (c.T * wy) @ c
    diff = eye[nbrs] - eye[x]
    gm = (diff.T * (wx / (2.0 * mx))) @ diff
    row = wx @ diff / mx
    g2 += -gm + 0.5 * np.outer(row, row)
    return g2, gm, row


if USE_NUMBA:
    laplacian = _laplacian_nb
    gamma = _gamma_nb
    gamma2_expanded = _gamma2_expanded_nb
    local_forms = _local_forms_nb
else:
    laplacian = _laplacian_np
    gamma = _gamma_np
    gamma2_expanded = _gamma2_expanded_np
    local_forms = _local_forms_np
