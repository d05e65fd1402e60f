import numpy as np
import pytest

from spinbloch.bath import BathSpec, expand_correlation
from spinbloch.dynmap import default_probe_states
from spinbloch.hierarchy import SystemSpec, propagate
from spinbloch.oracles import (dephasing_exact, dephasing_exponent,
                               lindblad_constant_rate)


class TestDephasingOracle:
    def test_exponent_starts_at_zero(self, weak_bath):
        t_fs = np.linspace(0.0, 50.0, 101)
        phi = dephasing_exponent(weak_bath, t_fs)
        assert phi[0] == 0.0
        # positive-definite kernel for this bath: checked, not assumed
        assert np.all(np.diff(phi) > 0.0)

    def test_zero_coupling_constant_coherence(self, table1_density):
        bath = BathSpec(table1_density.scaled(0.0), 300.0, n_matsubara=0)
        rho0 = np.full((2, 2), 0.5, dtype=complex)
        res = dephasing_exact(bath, rho0, np.linspace(0.0, 50.0, 51))
        np.testing.assert_allclose(res.coherence_magnitude, 0.5, atol=1e-12)

    def test_strictly_decreasing_coherence(self, weak_bath):
        rho0 = np.full((2, 2), 0.5, dtype=complex)
        res = dephasing_exact(weak_bath, rho0, np.linspace(0.0, 200.0, 201))
        assert np.all(np.diff(res.coherence_magnitude) < 0.0)
        np.testing.assert_allclose(
            res.coherence_magnitude, 0.5 * np.exp(-res.decoherence_exponent),
            rtol=1e-12)

    def test_heom_agreement_improves_with_level(self, weak_bath):
        exp = expand_correlation(weak_bath)
        sys = SystemSpec(omega0_d=4e-3, w_coupling=0.0)
        rho0 = np.full((2, 2), 0.5, dtype=complex)
        t_final = 60.0
        errs = []
        oracle = None
        for level in (1, 2, 3, 4):
            traj = propagate(rho0, sys, exp, level, t_final_fs=t_final,
                             sample_every_fs=1.0)
            if oracle is None:
                oracle = dephasing_exact(weak_bath, rho0, traj.times_fs)
            errs.append(float(np.max(np.abs(
                np.abs(traj.rho[:, 0, 1]) - oracle.coherence_magnitude))))
        assert errs[0] > errs[1] > errs[2] > errs[3]
        assert errs[3] < 1e-4


class TestConstantRateLindblad:
    def test_zero_rate_unitary(self):
        t_fs = np.linspace(0.0, 20.0, 201)
        res = lindblad_constant_rate(0.0, 4e-3, t_fs, default_probe_states())
        np.testing.assert_allclose(res.volume, 1.0, atol=1e-14)
        for tr in res.trajectories:
            np.testing.assert_allclose(np.abs(tr[:, 0, 1]), abs(tr[0, 0, 1]),
                                       atol=1e-14)

    def test_volume_is_exponential(self):
        t_fs = np.linspace(0.0, 20.0, 201)
        res = lindblad_constant_rate(2e-3, 4e-3, t_fs, default_probe_states())
        from spinbloch.units import fs_to_au

        np.testing.assert_allclose(res.volume,
                                   np.exp(-4.0 * 2e-3 * fs_to_au(t_fs)), rtol=1e-12)

    def test_trajectories_are_states(self):
        t_fs = np.linspace(0.0, 20.0, 201)
        res = lindblad_constant_rate(2e-3, 4e-3, t_fs, default_probe_states())
        for tr in res.trajectories:
            np.testing.assert_allclose(np.trace(tr, axis1=1, axis2=2), 1.0,
                                       atol=1e-14)
            assert np.min(np.linalg.eigvalsh(tr)) > -1e-14

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            lindblad_constant_rate(-1e-3, 4e-3, np.linspace(0, 1, 2),
                                   default_probe_states())
