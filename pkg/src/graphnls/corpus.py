"""Built-in graph families and the invariant sweep run over them."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .calculus import dirichlet_energy, gamma, gamma2, integrate, laplacian
from .curvature import all_local_forms, best_xi, lin_yau_certificate, verify_cd
from .graph import WeightedGraph
from .inequalities import check_lambda_bound, check_theorem2, tm_sup_estimate
from .spectral import spectrum

FAMILIES = ("path", "cycle", "complete", "star", "random")


def path_graph(n, w=1.0):
    return WeightedGraph([f"v{i}" for i in range(n)], [(f"v{i}", f"v{i + 1}", w) for i in range(n - 1)])


def cycle_graph(n, w=1.0):
    return WeightedGraph([f"v{i}" for i in range(n)], [(f"v{i}", f"v{(i + 1) % n}", w) for i in range(n)])


def complete_graph(n, w=1.0):
    return WeightedGraph(
        [f"v{i}" for i in range(n)],
        [(f"v{i}", f"v{j}", w) for i in range(n) for j in range(i + 1, n)],
    )


def star_graph(n, w=1.0):
    """Centre v0 joined to n - 1 leaves."""
    return WeightedGraph([f"v{i}" for i in range(n)], [("v0", f"v{i}", w) for i in range(1, n)])


def random_connected_graph(n, seed, w_range=(0.1, 10.0), p_extra=0.3):
    """Random spanning tree plus independent extra edges, uniform weights in ``w_range``."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = {}
    for k in range(1, n):
        a = int(order[k])
        b = int(order[rng.integers(k)])
        edges[(min(a, b), max(a, b))] = None
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p_extra:
                edges[(i, j)] = None
    lo, hi = w_range
    return WeightedGraph(
        [f"v{i}" for i in range(n)],
        [(f"v{i}", f"v{j}", float(rng.uniform(lo, hi))) for i, j in edges],
    )


def default_corpus(families=FAMILIES, random_count=50, max_random_n=20, seed=0):
    """List of ``(name, seed, graph)``; ``seed`` is None for deterministic families."""
    out = []
    fam = set(families)
    if "path" in fam:
        out += [(f"path-{n}", None, path_graph(n)) for n in range(2, 11)]
    if "cycle" in fam:
        out += [(f"cycle-{n}", None, cycle_graph(n)) for n in range(3, 11)]
    if "complete" in fam:
        out += [(f"complete-{n}", None, complete_graph(n)) for n in range(2, 9)]
    if "star" in fam:
        out += [(f"star-{n}", None, star_graph(n)) for n in range(3, 11)]
    if "random" in fam:
        sizes = np.random.default_rng(seed).integers(3, max_random_n + 1, size=random_count)
        for k in range(random_count):
            s = seed * 100003 + k
            out.append((f"random-{k}", s, random_connected_graph(int(sizes[k]), s)))
    return out


def _rel(a, b, scale):
    return float(abs(a - b) / max(scale, 1e-300))


def sweep_graph(g, seed=0, m=2.0, with_tm=False, tm_beta=2.0, tm_p=3.0, tm_starts=4):
    """Run every corpus invariant on one graph.

    Returns a dict with ``checks`` (name -> bool) and ``details``.
    """
    rng = np.random.default_rng(seed)
    checks = {}
    details = {}

    forms = all_local_forms(g)
    m_ly, xi_ly = lin_yau_certificate(g)
    cert = verify_cd(g, m_ly, xi_ly, forms=forms)
    checks["lin_yau"] = cert.holds
    details["lin_yau"] = {"xi": xi_ly, "min_eig": min(cert.per_vertex_min_eig.values())}

    u = rng.standard_normal(g.n)
    v = rng.standard_normal(g.n)
    a = gamma2(g, u, "iterated")
    b = gamma2(g, u, "expanded")
    err = float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)))
    checks["gamma2_forms"] = err < 1e-10
    details["gamma2_forms"] = {"max_rel_err": err}

    lap_u = laplacian(g, u)
    div = abs(integrate(g, lap_u))
    div_scale = float(np.dot(g.mu, np.abs(lap_u)))
    checks["divergence"] = div < 1e-12 * max(div_scale, 1e-300)
    lhs = integrate(g, gamma(g, u, v))
    lap_v = laplacian(g, v)
    scale = max(float(np.dot(g.mu, np.abs(u * lap_v))), float(np.dot(g.mu, np.abs(v * lap_u))),
                float(np.sqrt(dirichlet_energy(g, u) * dirichlet_energy(g, v))))
    green = max(_rel(lhs, integrate(g, -u * lap_v), scale),
                _rel(lhs, integrate(g, -v * lap_u), scale))
    checks["green"] = green < 1e-12
    details["identities"] = {"divergence": div, "divergence_scale": div_scale, "green_rel_err": green}

    xi = best_xi(g, m, forms=forms)
    pairs = spectrum(g)
    worst_lb = np.inf
    worst_t2 = np.inf
    ok_lb = ok_t2 = True
    for p in pairs[1:]:
        r1 = check_lambda_bound(p.lam, m, xi)
        r2 = check_theorem2(g, p, m, xi, certify=False)
        ok_lb &= r1.holds
        ok_t2 &= r2.slack >= -1e-9
        worst_lb = min(worst_lb, r1.slack)
        worst_t2 = min(worst_t2, r2.slack)
    checks["lambda_bound"] = bool(ok_lb)
    checks["theorem2"] = bool(ok_t2)
    details["theorem2"] = {"m": m, "best_xi": xi, "min_slack_lambda_bound": worst_lb,
                           "min_slack_theorem2": worst_t2, "best_xi_certified": verify_cd(g, m, xi, forms=forms).holds}
    checks["best_xi_ge_lin_yau"] = xi >= xi_ly - 1e-8

    if with_tm:
        est = tm_sup_estimate(g, tm_beta, tm_p, starts=tm_starts, seed=seed)
        checks["tm_bound"] = (not est.converged) or est.empirical_sup <= est.theoretical_bound
        details["tm"] = {"empirical_sup": est.empirical_sup, "theoretical_bound": est.theoretical_bound,
                         "C0": est.C0, "converged": est.converged, "volume": est.volume}
    return {"checks": checks, "details": details}


def run_corpus(entries, seed=0, jobs=1, **kw):
    """Sweep every ``(name, graph_seed, graph)`` entry; rows keep corpus order."""

    def one(entry):
        name, gseed, g = entry
        res = sweep_graph(g, seed=seed if gseed is None else gseed, **kw)
        failed = [k for k, ok in res["checks"].items() if not ok]
        return {"name": name, "graph_seed": gseed, "n": g.n, "sha256": g.digest,
                "passed": not failed, "failed": failed, **res}

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(one, entries))
    else:
        rows = [one(e) for e in entries]
    names = sorted({k for r in rows for k in r["checks"]})
    matrix = {k: sum(bool(r["checks"].get(k)) for r in rows) for k in names}
    failures = [{"name": r["name"], "graph_seed": r["graph_seed"], "violated": r["failed"]}
                for r in rows if r["failed"]]
    return {"count": len(rows), "pass_counts": matrix, "all_passed": not failures,
            "failures": failures, "rows": rows}
