"""Dynamical map reconstruction and non-Markovianity diagnostics.

The map F(t) sends the coordinate vector of rho_S(0) to that of rho_S(t) in
the orthonormal Hermitian basis {I, sigma_x, sigma_y, sigma_z}/sqrt(2). Its
determinant (equivalently, the determinant of the lower-right 3x3 Bloch
block under trace preservation) is the volume of accessible states V(t);
intervals with dV/dt > 0 witness information back-flow. The time-local
generator L(t) = Fdot F^-1 is decomposed into canonical form; the
eigenvalues of its 3x3 decoherence matrix are the canonical rates, which
may transiently go negative. Canonical Lindblad operators carry unit
Hilbert-Schmidt norm, fixing the rate-sum relation  -d/dt ln V = 2 sum_k
gamma_k (verified on the constant-rate dephasing semigroup).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularProbeSet
from .hierarchy import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z
from .units import fs_to_au

# orthonormal Hermitian basis, G_0 proportional to the identity
PAULI_BASIS = np.stack([IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z]) / np.sqrt(2.0)

DEFAULT_SINGULAR_TOL = 1e-12
DEFAULT_SLOPE_THRESHOLD = 1e-7  # on dV/dt, per fs


def bloch_coordinates(rho: np.ndarray) -> np.ndarray:
    """Real coordinate vector(s) Tr(G_i rho) of Hermitian matrices."""
    return np.real(np.einsum("imn,...nm->...i", PAULI_BASIS, rho))


def coordinates_to_rho(vec: np.ndarray) -> np.ndarray:
    return np.einsum("...i,imn->...mn", vec, PAULI_BASIS)


def default_probe_states() -> list[np.ndarray]:
    """|1><1|, |2><2|, |+><+|, |+i><+i| -- linearly independent over Hermitian 2x2."""
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    plus_i = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)
    return [
        np.diag([1.0, 0.0]).astype(complex),
        np.diag([0.0, 1.0]).astype(complex),
        np.outer(plus, plus.conj()),
        np.outer(plus_i, plus_i.conj()),
    ]


@dataclass
class DynamicalMap:
    times_fs: np.ndarray
    f: np.ndarray  # (n_times, 4, 4) real


@dataclass
class NonMarkovReport:
    times_fs: np.ndarray
    volume: np.ndarray
    gamma_total: np.ndarray
    canonical_rates: np.ndarray          # (n_times, 3)
    witness_intervals: list[tuple[float, float]]
    singular_after: float | None


def reconstruct_map(times_fs: np.ndarray, trajectories: list[np.ndarray]) -> DynamicalMap:
    """Solve F(t) [vec rho_i(0)] = [vec rho_i(t)] from four probe propagations."""
    if len(trajectories) != 4:
        raise SingularProbeSet("need exactly four probe trajectories")
    a = np.stack([bloch_coordinates(tr[0]) for tr in trajectories], axis=1)  # 4x4
    if np.linalg.matrix_rank(a, tol=1e-10) < 4:
        raise SingularProbeSet("probe initial states do not span Hermitian 2x2 space")
    a_inv = np.linalg.inv(a)
    b = np.stack([bloch_coordinates(tr) for tr in trajectories], axis=-1)  # (nt,4,4)
    return DynamicalMap(times_fs=np.asarray(times_fs, float), f=b @ a_inv)


def volume(dmap: DynamicalMap) -> np.ndarray:
    """V(t) = det of the 3x3 Bloch block (equals the 4x4 determinant when trace-preserving)."""
    return np.linalg.det(dmap.f[:, 1:, 1:])


def gamma_total(times_fs: np.ndarray, vol: np.ndarray,
                singular_tol: float = DEFAULT_SINGULAR_TOL) -> np.ndarray:
    """Gamma(t) from V(t) = V(0) exp(-Gamma t / 2), in a.u.; NaN where V <= tol."""
    t_au = fs_to_au(np.asarray(times_fs, float))
    out = np.full_like(t_au, np.nan)
    ok = vol > singular_tol
    ratio = np.where(ok, vol / vol[0], 1.0)
    mask = ok & (t_au > 0.0)
    out[mask] = -2.0 * np.log(ratio[mask]) / t_au[mask]
    # right-limit at t = 0 from the first finite-difference slope of ln V
    if len(t_au) > 1 and ok[0] and ok[1]:
        out[0] = -2.0 * (np.log(vol[1]) - np.log(vol[0])) / (t_au[1] - t_au[0])
    return out


def _central_diff(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Central differences along axis 0, second-order one-sided at the endpoints."""
    return np.gradient(y, x, axis=0, edge_order=2)


def witness_nonmarkov(times_fs: np.ndarray, vol: np.ndarray,
                      slope_threshold: float = DEFAULT_SLOPE_THRESHOLD,
                      ) -> list[tuple[float, float]]:
    """Maximal intervals (t_start, t_end) in fs where dV/dt exceeds the threshold."""
    times_fs = np.asarray(times_fs, float)
    dvdt = _central_diff(vol, times_fs)
    above = dvdt > slope_threshold
    intervals = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = times_fs[i]
        elif not flag and start is not None:
            intervals.append((start, times_fs[i - 1]))
            start = None
    if start is not None:
        intervals.append((start, times_fs[-1]))
    return intervals


_T_CACHE: dict[int, np.ndarray] = {}


def _pauli_to_kossakowski_transform() -> np.ndarray:
    """Inverse of the linear map q_{mn} -> L_ab with L_ab = sum_{mn} q_{mn} Tr(G_a G_m G_b G_n)."""
    if 0 not in _T_CACHE:
        t = np.einsum("aij,mjk,bkl,nli->abmn", *(PAULI_BASIS,) * 4).reshape(16, 16)
        _T_CACHE[0] = np.linalg.inv(t)
    return _T_CACHE[0]


def generator_decomposition(l_pauli: np.ndarray):
    """Split a Pauli-basis generator into (decoherence matrix, effective Hamiltonian).

    Writes L[rho] = sum_{mn} q_{mn} G_m rho G_n; the 3x3 block q_{jk} (j,k >= 1)
    is the decoherence matrix whose eigenvalues are the canonical rates, and the
    m=0/n=0 border encodes the Hamiltonian part.
    """
    t_inv = _pauli_to_kossakowski_transform()
    q = (t_inv @ l_pauli.reshape(16).astype(complex)).reshape(4, 4)
    decoherence = 0.5 * (q[1:, 1:] + q[1:, 1:].conj().T)
    x = np.tensordot(q[1:, 0], PAULI_BASIS[1:], axes=(0, 0)) / np.sqrt(2.0)
    h_eff = (x.conj().T - x) / 2.0j
    return decoherence, h_eff


def canonical_rates(dmap: DynamicalMap,
                    singular_tol: float = DEFAULT_SINGULAR_TOL):
    """Canonical decoherence rates gamma_k(t) and the generator series L(t) = Fdot F^-1.

    Fdot uses central differences on the sampling grid. Past the first time
    where |det F| <= singular_tol the rates are NaN (undefined, not
    extrapolated).
    """
    t_au = fs_to_au(dmap.times_fs)
    fdot = _central_diff(dmap.f, t_au)
    n_t = len(t_au)
    rates = np.full((n_t, 3), np.nan)
    generator = np.full((n_t, 4, 4), np.nan)
    dets = np.abs(np.linalg.det(dmap.f))
    singular = np.nonzero(dets <= singular_tol)[0]
    stop = singular[0] if len(singular) else n_t
    for i in range(stop):
        l_pauli = fdot[i] @ np.linalg.inv(dmap.f[i])
        generator[i] = l_pauli
        decoherence, _ = generator_decomposition(l_pauli)
        rates[i] = np.sort(np.linalg.eigvalsh(decoherence))[::-1]
    return rates, generator


def purity(rho_series: np.ndarray) -> np.ndarray:
    """Tr(rho^2) along a stacked density-matrix series."""
    return np.real(np.einsum("...ij,...ji->...", rho_series, rho_series))


def analyze(times_fs: np.ndarray, dmap: DynamicalMap,
            slope_threshold: float = DEFAULT_SLOPE_THRESHOLD,
            singular_tol: float = DEFAULT_SINGULAR_TOL) -> NonMarkovReport:
    vol = volume(dmap)
    rates, _ = canonical_rates(dmap, singular_tol=singular_tol)
    below = np.nonzero(np.abs(np.linalg.det(dmap.f)) <= singular_tol)[0]
    return NonMarkovReport(
        times_fs=np.asarray(times_fs, float),
        volume=vol,
        gamma_total=gamma_total(times_fs, vol, singular_tol),
        canonical_rates=rates,
        witness_intervals=witness_nonmarkov(times_fs, vol, slope_threshold),
        singular_after=float(times_fs[below[0]]) if len(below) else None,
    )
