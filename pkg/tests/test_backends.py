"""The numba kernel and the numpy fallback must agree to machine precision,
and results must not depend on the numba thread count."""

import numpy as np
import pytest

from spinbloch import kernels
from spinbloch.bath import expand_correlation
from spinbloch.hierarchy import SystemSpec, build_hierarchy, propagate


def _random_problem(rng, n_modes=4, level=3):
    hier = build_hierarchy(n_modes, level)
    n_ado = hier.n_ado
    rho = rng.standard_normal((n_ado, 2, 2)) + 1j * rng.standard_normal((n_ado, 2, 2))
    h = rng.standard_normal((2, 2))
    h_sys = np.ascontiguousarray((h + h.T) / 2 + 0j)
    s_op = np.ascontiguousarray(np.array([[1.0, 0.0], [0.0, -1.0]]) + 0j)
    zeta = rng.standard_normal(n_modes) + 1j * np.abs(rng.standard_normal(n_modes))
    alpha = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
    alpha_tilde = np.conj(alpha)
    nvec = hier.nvec.astype(np.float64)
    return rho, h_sys, s_op, zeta, alpha, alpha_tilde, nvec, hier.plus_idx, hier.minus_idx


def _eval(rho, *rest):
    out = np.empty_like(rho)
    kernels.heom_rhs_kernel(np.ascontiguousarray(rho), out, *rest)
    return out


@pytest.fixture
def problem(rng):
    return _random_problem(rng)


def test_backends_agree_on_random_hierarchy(problem):
    if kernels.backend_name() != "numba":
        pytest.skip("numba unavailable; nothing to compare")
    rho, *rest = problem
    kernels.set_backend("numba")
    try:
        got_numba = _eval(rho, *rest)
    finally:
        kernels.set_backend("numpy")
    got_numpy = _eval(rho, *rest)
    kernels.set_backend("numba")
    assert np.max(np.abs(got_numba - got_numpy)) < 1e-13


def test_thread_count_does_not_change_kernel_output(problem):
    if kernels.backend_name() != "numba":
        pytest.skip("numba unavailable")
    rho, *rest = problem
    kernels.set_num_threads(1)
    one = _eval(rho, *rest)
    kernels.set_num_threads(4)
    four = _eval(rho, *rest)
    assert np.array_equal(one, four)


def test_propagation_matches_across_backends(weak_bath):
    """Short end-to-end run through both code paths."""
    if kernels.backend_name() != "numba":
        pytest.skip("numba unavailable")
    exp = expand_correlation(weak_bath)
    hier = build_hierarchy(exp.n_modes, 2)
    system = SystemSpec(omega0_d=0.0, w_coupling=5e-4)
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)

    def _go():
        return propagate(rho0, system, exp, 2, dt_au=0.5,
                         t_final_fs=5.0, sample_every_fs=1.0, hier=hier)

    kernels.set_backend("numpy")
    try:
        traj_np = _go()
    finally:
        kernels.set_backend("numba")
    traj_nb = _go()
    assert np.max(np.abs(traj_nb.rho - traj_np.rho)) < 1e-12
