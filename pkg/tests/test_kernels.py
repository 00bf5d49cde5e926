"""numba and numpy kernel variants must agree; the env flag must switch backends."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from graphnls import _kernels as K

from conftest import graph_and_function, graphs

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def _csr(g):
    return g.indptr, g.indices, g.weights, g.mu


@given(graph_and_function(k=2))
def test_laplacian_and_gamma_parity(guv):
    g, u, v = guv
    np.testing.assert_allclose(K._laplacian_nb(*_csr(g), u), K._laplacian_np(*_csr(g), u), rtol=1e-13, atol=1e-12)
    np.testing.assert_allclose(K._gamma_nb(*_csr(g), u, v), K._gamma_np(*_csr(g), u, v), rtol=1e-13, atol=1e-11)


@given(graph_and_function())
def test_gamma2_parity(gu):
    g, u = gu
    a = K._gamma2_expanded_nb(*_csr(g), u)
    b = K._gamma2_expanded_np(*_csr(g), u)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-10)


@given(graphs(max_n=8))
def test_local_forms_parity(g):
    for x in range(g.n):
        for a, b in zip(K._local_forms_nb(*_csr(g), x), K._local_forms_np(*_csr(g), x)):
            np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", "numba"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, GRAPHNLS_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import graphnls; print(graphnls.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == expected
