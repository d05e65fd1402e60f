"""Independent reference solutions used to validate the engine.

Two closed forms:

* pure dephasing (commuting coupling, W = 0), where the Gaussian bath gives
  the exact coherence decay |rho_12(t)| = |rho_12(0)| exp(-Phi(t)) with
  Phi(t) = 4 int_0^t (t - tau) Re C(tau) dtau. The prefactor 4 comes from
  the +-1 eigenvalues of the sigma_z coupling and is cross-checked against
  the hierarchy at high truncation in the test suite.
* the constant-rate dephasing semigroup, whose map, volume, total rate and
  canonical rates are all analytic.

Both stay off the code paths they validate: Phi uses the quadrature C(t),
never the mode expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, correlation_quadrature
from .dynmap import DynamicalMap
from .errors import QuadratureNotConverged
from .units import fs_to_au


@dataclass
class DephasingOracleResult:
    times_fs: np.ndarray
    coherence_magnitude: np.ndarray
    decoherence_exponent: np.ndarray


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def dephasing_exponent(bath: BathSpec, t_grid_fs: np.ndarray,
                       rtol: float = 1e-8) -> np.ndarray:
    """Phi(t) = 4 int_0^t (t - tau) Re C(tau) dtau by nested quadrature.

    The outer integral is refined by halving the tau step until stable to
    `rtol` relative.
    """
    t_au = fs_to_au(np.asarray(t_grid_fs, float))
    t_max = float(t_au[-1])
    n = 4096
    prev = None
    while n <= (1 << 17):
        tau = np.linspace(0.0, t_max, n + 1)
        re_c = correlation_quadrature(bath, tau).real
        i0 = _cumtrapz(re_c, tau)
        i1 = _cumtrapz(tau * re_c, tau)
        phi = 4.0 * (tau * i0 - i1)
        on_grid = np.interp(t_au, tau, phi)
        if prev is not None:
            scale = max(np.max(np.abs(on_grid)), 1e-300)
            if np.max(np.abs(on_grid - prev)) <= rtol * scale:
                return on_grid
        prev = on_grid
        n *= 2
    raise QuadratureNotConverged("nested dephasing quadrature did not stabilize")


def dephasing_exact(bath: BathSpec, rho0: np.ndarray,
                    t_grid_fs: np.ndarray) -> DephasingOracleResult:
    """Exact coherence decay for the W = 0 configuration (populations constant)."""
    phi = dephasing_exponent(bath, t_grid_fs)
    coh0 = abs(complex(np.asarray(rho0)[0, 1]))
    return DephasingOracleResult(
        times_fs=np.asarray(t_grid_fs, float),
        coherence_magnitude=coh0 * np.exp(-phi),
        decoherence_exponent=phi,
    )


@dataclass
class ConstantRateLindbladResult:
    times_fs: np.ndarray
    trajectories: list[np.ndarray]     # one (n_t, 2, 2) series per probe state
    map: DynamicalMap
    volume: np.ndarray
    gamma_total: float                 # a.u., constant
    canonical_rates: tuple[float, float, float]


def lindblad_constant_rate(rate: float, omega0: float,
                           t_grid_fs: np.ndarray,
                           probes: list[np.ndarray]) -> ConstantRateLindbladResult:
    """Closed-form dephasing semigroup: rhodot = -i[(omega0/2) sz, rho] + rate (sz rho sz - rho).

    Coherences rotate at omega0 and contract as exp(-2 rate t); populations are
    frozen. In the unit-norm canonical convention this is a single channel of
    rate 2*rate, so V(t) = exp(-4 rate t) and Gamma(t) = 8 rate.
    """
    if rate < 0.0:
        raise ValueError("rate must be >= 0")
    t_au = fs_to_au(np.asarray(t_grid_fs, float))
    damp = np.exp(-2.0 * rate * t_au)
    phase = np.exp(-1j * omega0 * t_au)

    trajectories = []
    for rho0 in probes:
        rho0 = np.asarray(rho0, dtype=complex)
        out = np.empty((len(t_au), 2, 2), dtype=complex)
        out[:, 0, 0] = rho0[0, 0]
        out[:, 1, 1] = rho0[1, 1]
        out[:, 0, 1] = rho0[0, 1] * damp * phase
        out[:, 1, 0] = np.conj(out[:, 0, 1])
        trajectories.append(out)

    cos, sin = np.cos(omega0 * t_au), np.sin(omega0 * t_au)
    f = np.zeros((len(t_au), 4, 4))
    f[:, 0, 0] = 1.0
    f[:, 3, 3] = 1.0
    f[:, 1, 1] = damp * cos
    f[:, 1, 2] = -damp * sin
    f[:, 2, 1] = damp * sin
    f[:, 2, 2] = damp * cos
    dmap = DynamicalMap(times_fs=np.asarray(t_grid_fs, float), f=f)
    return ConstantRateLindbladResult(
        times_fs=np.asarray(t_grid_fs, float),
        trajectories=trajectories,
        map=dmap,
        volume=damp**2,
        gamma_total=8.0 * rate,
        canonical_rates=(2.0 * rate, 0.0, 0.0),
    )
