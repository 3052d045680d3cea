import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import special

from gbias import _backend

BACKENDS = _backend.available()


@pytest.fixture(params=BACKENDS)
def impl(request):
    return _backend.get(request.param)


class TestSelection:
    def test_python_always_available(self):
        assert "python" in BACKENDS

    def test_unknown(self):
        with pytest.raises(ValueError):
            _backend.get("fortran")

    def test_env_forces_fallback(self):
        env = dict(os.environ, GBIAS_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "import gbias; print(gbias.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"


class TestKernels:
    def test_loggamma_array(self, impl):
        z = np.array([0.5 + 0j, 3.2 - 1.5j, -4.3 + 0.2j, 20 + 60j, 1e-3 + 1e-3j])
        np.testing.assert_allclose(impl.loggamma_array(z), special.loggamma(z), rtol=1e-13)

    def test_loggamma_scalar(self, impl):
        np.testing.assert_allclose(impl.loggamma_scalar(2.5 + 1j), special.loggamma(2.5 + 1j),
                                   rtol=1e-13)

    def test_mb_log_integrand(self, impl):
        tau = np.linspace(-5, 5, 11)
        a = np.array([0.0, 1.3])
        got = impl.mb_log_integrand(0.7, a, 0.5, tau)
        s = 0.5 + 1j * tau
        want = -s * 0.7 + special.loggamma(s) + special.loggamma(s + 1.3)
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_mb_sum(self, impl):
        a = np.array([0.0, 0.5])
        tau = 0.1 + 0.25 * np.arange(40)
        want = np.sum(np.exp(impl.mb_log_integrand(-0.3, a, 1.0, tau) - 2.0).real)
        np.testing.assert_allclose(impl.mb_sum(-0.3, a, 1.0, 0.1, 0.25, 40, 2.0), want,
                                   rtol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
def test_backends_agree():
    c, p = _backend.get("compiled"), _backend.get("python")
    rng = np.random.default_rng(0)
    z = rng.uniform(-20, 20, 200) + 1j * rng.uniform(-50, 50, 200)
    np.testing.assert_allclose(c.loggamma_array(z), p.loggamma_array(z), rtol=1e-13)
    a = np.array([0.5, 1.3, 2.0])
    np.testing.assert_allclose(c.mb_sum(0.4, a, 1.0, 0.0, 0.1, 500, 0.0),
                               p.mb_sum(0.4, a, 1.0, 0.0, 0.1, 500, 0.0), rtol=1e-12)
