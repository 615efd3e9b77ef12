import numpy as np
import pytest

from subnetsim import _kernels
from subnetsim.campaign import run_drop
from subnetsim.config import SimConfig


def test_python_backend_always_available():
    assert "python" in _kernels.BACKENDS
    assert _kernels.backend_name(_kernels.get_backend("python")) == "python"
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@pytest.mark.skipif("cython" not in _kernels.BACKENDS, reason="compiled kernels not built")
@pytest.mark.parametrize("B, A_b, mode", [(1, 20, "apr"), (30, 20, "apr"), (30, 5, "fixed"),
                                          (50, 1, "fixed")])
def test_backend_parity(B, A_b, mode):
    cfg = SimConfig(num_subnetworks=B, aps_per_subnetwork=A_b, power_mode=mode,
                    fading_realizations_per_drop=2)
    for i in range(3):
        py = run_drop(cfg, i, 8, _kernels.get_backend("python"))
        cy = run_drop(cfg, i, 8, _kernels.get_backend("cython"))
        assert py.topology_digest == cy.topology_digest
        np.testing.assert_array_equal(py.deferred, cy.deferred)
        np.testing.assert_array_equal(py.tx_power_dbm, cy.tx_power_dbm)
        np.testing.assert_allclose(cy.sinr, py.sinr, rtol=1e-9)
        np.testing.assert_allclose(cy.rate_bps, py.rate_bps, rtol=1e-9, atol=1e-6)


@pytest.mark.skipif("cython" not in _kernels.BACKENDS, reason="compiled kernels not built")
def test_raw_kernel_parity(rng):
    py, cy = _kernels.get_backend("python"), _kernels.get_backend("cython")
    gain = rng.exponential(1e-8, (60, 48))
    mu = rng.uniform(1e-5, 1e-3, 60)
    np.testing.assert_allclose(cy.ap_interference(gain, mu, 12, 4),
                               py.ap_interference(gain, mu, 12, 4), rtol=1e-12)


def test_env_override(monkeypatch):
    monkeypatch.setenv("SUBNETSIM_BACKEND", "python")
    assert _kernels.backend_name(_kernels.get_backend()) == "python"
