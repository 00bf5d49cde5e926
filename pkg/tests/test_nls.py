import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphnls import (
    Power,
    VertexSubsetProblem,
    check_hypotheses,
    functional_J,
    gradient_J,
    mountain_pass_solve,
    newton_refine,
    verify_solution,
)
from graphnls.corpus import complete_graph, cycle_graph, path_graph, star_graph
from graphnls.errors import NoDescentEndpointError, ValidationError
from graphnls.nls import find_endpoint, sign_report

from conftest import graphs

CONVENTIONS = ["dirichlet_energy", "grad_sq"]


def _fd_gradient(g, u, alpha, f, problem, convention, h=1e-6):
    # central differences of J, divided by mu to get the mu-gradient
    out = np.zeros(g.n)
    idx = range(g.n) if problem is None else problem.interior
    for x in idx:
        e = np.zeros(g.n)
        e[x] = h
        jp = functional_J(g, u + e, alpha, f, problem, convention)
        jm = functional_J(g, u - e, alpha, f, problem, convention)
        out[x] = (jp - jm) / (2 * h) / g.mu[x]
    return out


def test_power_validation():
    with pytest.raises(ValidationError):
        Power(2.0)
    with pytest.raises(ValidationError):
        Power(4.0, a=-1.0)
    assert Power(4.0).ar_q == 3.5


def test_J_examples(k2):
    f = Power(4.0)
    assert functional_J(k2, [0.0, 0.0], -1.0, f) == 0.0
    assert functional_J(k2, [1.0, 1.0], -1.0, f) == 0.5
    # grad_sq doubles the gradient part: J(1, -1) = 1/2 (2*4 + 2) - 1/4
    assert functional_J(k2, [1.0, -1.0], -1.0, f, convention="grad_sq") == 4.75


def test_J_unbounded_below_along_rays(k2):
    f = Power(4.0)
    vals = [functional_J(k2, 2.0**k * np.array([1.0, 0.5]), 0.5, f) for k in range(21)]
    assert vals[-1] < -1e20
    assert all(b < a for a, b in zip(vals[5:], vals[6:]))


def test_gradient_zero_at_origin(p3):
    assert np.all(gradient_J(p3, np.zeros(3), 0.3, Power(3.0)) == 0.0)


@given(graphs(max_n=8), st.integers(0, 2**31 - 1), st.sampled_from(CONVENTIONS), st.booleans())
def test_gradient_matches_finite_differences(g, seed, convention, dirichlet):
    rng = np.random.default_rng(seed)
    problem = None
    u = rng.uniform(-1.5, 1.5, g.n)
    if dirichlet:
        k = int(rng.integers(1, g.n)) if g.n > 1 else 1
        problem = VertexSubsetProblem.from_labels(g, g.vertices[:k])
        u[~problem.mask] = 0.0
    f = Power(float(rng.uniform(2.5, 5.0)), a=rng.uniform(0.1, 2.0, g.n))
    alpha = float(rng.uniform(-2, 2))
    fd = _fd_gradient(g, u, alpha, f, problem, convention)
    an = gradient_J(g, u, alpha, f, problem, convention)
    scale = np.max(np.abs(an)) + 1.0
    assert np.max(np.abs(fd - an)) <= 1e-6 * scale


def test_dirichlet_support_enforced(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    with pytest.raises(ValidationError, match="vanish"):
        functional_J(p3, [1.0, 1.0, 0.0], 0.0, Power(4.0), prob)


def test_unknown_convention(k2):
    with pytest.raises(ValidationError):
        functional_J(k2, [0.0, 0.0], 0.0, Power(4.0), convention="nope")


def test_hypotheses_q4_p3():
    rep = check_hypotheses(Power(4.0), 3.0)
    assert all(rep.status(h) == "holds" for h in ("H1", "H2", "H3", "H4", "H5"))


def test_hypotheses_h4_fails_for_large_p():
    assert check_hypotheses(Power(4.0), 5.0).status("H4") == "fails"


def test_hypotheses_q3_p25():
    rep = check_hypotheses(Power(3.0, ar_q=2.8), 2.5)
    assert rep.status("H5") == "holds"


def test_hypotheses_h5_boundary():
    rep = check_hypotheses(Power(4.0, ar_q=4.0), 3.0)
    assert rep.status("H5") == "fails"
    assert "strict" in rep.to_dict()["entries"]["H5"]["problems"][0]


def test_find_endpoint_k2(k2):
    t, e = find_endpoint(k2, np.ones(2), -1.0, Power(4.0))
    # J(t 1) = t^2 - t^4 / 2 < 0 first for t = 2 among powers of two
    assert t == 2.0
    assert functional_J(k2, e, -1.0, Power(4.0)) < 0


def test_find_endpoint_dirichlet(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    t, _ = find_endpoint(p3, np.array([0.0, 1.0, 0.0]), 0.0, Power(4.0), prob)
    assert math.isfinite(t)


def test_find_endpoint_coercive(k2):
    with pytest.raises(NoDescentEndpointError, match="no descent endpoint"):
        find_endpoint(k2, np.ones(2), -1.0, Power(4.0, a=0.0))


def test_newton_p3_from_09(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    sol = newton_refine(p3, [0.0, 0.9, 0.0], 0.0, Power(4.0), prob)
    assert abs(sol.u[1] - 1.0) <= 1e-12
    assert sol.newton_iterations <= 6


def test_newton_fixed_points(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    sol = newton_refine(p3, [0.0, 1.0, 0.0], 0.0, Power(4.0), prob)
    assert sol.newton_iterations == 0 and sol.residual == 0.0
    sol = newton_refine(p3, [0.0, 0.0, 0.0], 0.0, Power(4.0), prob)
    assert sol.newton_iterations == 0 and np.all(sol.u == 0.0)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.75])
def test_dirichlet_p3_solution(p3, alpha):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    sol = mountain_pass_solve(p3, alpha, Power(4.0), prob)
    assert sol.accepted
    assert abs(sol.u[1] - math.sqrt(1 - alpha)) <= 1e-9
    assert sol.u[0] == 0.0 and sol.u[2] == 0.0
    assert sol.sign_report == "positive"


def test_dirichlet_p3_above_threshold(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    sol = mountain_pass_solve(p3, 1.5, Power(4.0), prob)
    assert sol.sign_report in ("trivial", "sign_changing")


def test_k2_coercive_solution(k2):
    sol = mountain_pass_solve(k2, -1.0, Power(4.0))
    assert sol.accepted
    assert sol.residual < 1e-10
    assert abs(sol.J_value - 0.5) <= 1e-10
    # (1, 1) is a degenerate critical point: the Jacobian is singular there,
    # so u is only pinned to about sqrt(machine eps)
    assert np.max(np.abs(sol.u - 1.0)) < 1e-5
    assert sol.sign_report == "positive"


def test_trace_path_max_non_increasing(k2, p3):
    for g, alpha, prob in [(k2, -1.0, None), (p3, 0.5, VertexSubsetProblem.from_labels(p3, ["b"]))]:
        sol = mountain_pass_solve(g, alpha, Power(4.0), prob)
        levels = [t["path_max"] for t in sol.trace if t["stage"] == "deform"]
        assert levels and all(b <= a for a, b in zip(levels, levels[1:]))


@pytest.mark.parametrize("g", [cycle_graph(4), complete_graph(3), path_graph(5), star_graph(6)], ids=str)
def test_coercive_regime_gives_nonnegative(g):
    sol = mountain_pass_solve(g, -0.5, Power(3.0))
    assert sol.accepted
    assert sol.sign_report in ("positive", "nonnegative")
    rep = verify_solution(g, sol, -0.5, Power(3.0))
    assert rep["constant_test"]["consistent"]
    assert rep["u_minus_test"]["u_minus_zero"]


def test_scaling_covariance(p3):
    prob = VertexSubsetProblem.from_labels(p3, ["b"])
    sol = mountain_pass_solve(p3, 0.5, Power(4.0), prob)
    c = 3.0
    scaled = Power(4.0).scaled(c ** (2 - 4.0))
    r = gradient_J(p3, c * sol.u, 0.5, scaled, prob)
    assert np.max(np.abs(r)) <= 1e-10 * c**1


def test_verify_exact_solution(k2):
    rep = verify_solution(k2, np.ones(2), -1.0, Power(4.0))
    assert rep["residual"] == 0.0
    assert rep["u_minus_test"]["value"] == 0.0
    assert rep["constant_test"]["lhs"] == 2.0 and rep["constant_test"]["rhs"] == 2.0
    assert rep["constant_test"]["consistent"]


def test_verify_sign_changing_fixture(k2):
    s = math.sqrt(2.0)
    rep = verify_solution(k2, np.array([s, -s]), 0.0, Power(4.0))
    assert not rep["constant_test"]["consistent"]
    assert rep["constant_test"]["rhs"] == pytest.approx(s**3)
    assert rep["sign_report"] == "sign_changing"


def test_verify_trivial(k2):
    rep = verify_solution(k2, np.zeros(2), 0.5, Power(4.0))
    assert rep["sign_report"] == "trivial"
    assert rep["residual"] == 0.0 and rep["u_minus_test"]["vanishes"]
    assert rep["constant_test"]["consistent"]


def test_k2_obstruction(k2):
    sol = mountain_pass_solve(k2, 0.5, Power(4.0))
    assert sol.sign_report in ("trivial", "sign_changing")
    rep = verify_solution(k2, sol, 0.5, Power(4.0))
    assert rep["constant_test"]["nonnegative_nontrivial_possible"] is False
    # any nonnegative nontrivial candidate is inconsistent
    for u in ([1.0, 0.0], [0.3, 0.7], [2.0, 2.0]):
        assert not verify_solution(k2, np.array(u), 0.5, Power(4.0))["constant_test"]["consistent"]


def test_sign_report_thresholds():
    assert sign_report(np.array([0.0, 1e-10])) == "trivial"
    assert sign_report(np.array([1.0, 0.0])) == "nonnegative"
    assert sign_report(np.array([1.0, 0.5])) == "positive"
    assert sign_report(np.array([1.0, -0.5])) == "sign_changing"


def test_solution_dict(k2):
    d = mountain_pass_solve(k2, -1.0, Power(4.0)).to_dict(k2.vertices)
    assert set(d["u"]) == {"a", "b"}
    assert d["trace"][0]["stage"] == "deform"
