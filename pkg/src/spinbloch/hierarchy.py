"""Auxiliary-density-operator hierarchy: construction and time propagation.

The reduced density matrix is the level-0 element of a chain of auxiliary
matrices rho_n indexed by occupation vectors n over the K dissipative modes
of the correlation expansion. Propagation integrates the time-local coupled
equations with fixed-step RK4; truncation is hard (ADOs above level L are
zero), matching a plain level-truncation convergence study.

The hierarchy logic is dimension-agnostic; only the default system operators
are 2x2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import CorrelationExpansion
from .errors import CapacityExceeded, DimensionMismatch, Diverged
from .kernels import heom_rhs_kernel
from .units import fs_to_au

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class SystemSpec:
    """Two-level system in the diabatic basis: H_S = (omega0_d/2) sigma_z + W sigma_x."""

    omega0_d: float
    w_coupling: float

    @property
    def omega0(self) -> float:
        """Adiabatic transition frequency 2 sqrt(omega0_d^2/4 + W^2)."""
        return 2.0 * math.sqrt(self.omega0_d**2 / 4.0 + self.w_coupling**2)

    @classmethod
    def from_omega0(cls, omega0: float) -> "SystemSpec":
        """Degenerate-diabatic convention: omega0_d = 0, W = omega0/2."""
        return cls(omega0_d=0.0, w_coupling=omega0 / 2.0)

    def hamiltonian(self) -> np.ndarray:
        return (self.omega0_d / 2.0) * SIGMA_Z + self.w_coupling * SIGMA_X

    def adiabatic_rotation(self) -> np.ndarray:
        """Unitary U whose columns diagonalize H_S, ground state first.

        Phase convention: first nonzero component of each eigenvector is real
        positive.
        """
        evals, vecs = np.linalg.eigh(self.hamiltonian())
        order = np.argsort(evals)
        vecs = vecs[:, order]
        for j in range(vecs.shape[1]):
            col = vecs[:, j]
            idx = np.argmax(np.abs(col) > 1e-14)
            phase = col[idx] / abs(col[idx])
            vecs[:, j] = col / phase
        return vecs


def to_adiabatic(rho: np.ndarray, sys: SystemSpec) -> np.ndarray:
    """Rotate a density matrix (or a stacked series of them) into the adiabatic basis."""
    u = sys.adiabatic_rotation()
    return u.conj().T @ rho @ u


def from_adiabatic(rho: np.ndarray, sys: SystemSpec) -> np.ndarray:
    u = sys.adiabatic_rotation()
    return u @ rho @ u.conj().T


def hierarchy_size(n_modes: int, level: int) -> int:
    return math.comb(n_modes + level, level)


@dataclass(frozen=True)
class Hierarchy:
    """Occupation vectors with sum <= L in graded lexicographic order, plus neighbor tables.

    plus_idx/minus_idx hold the array offset of n_k^+ / n_k^- per (ADO, mode),
    or -1 where the neighbor is truncated away (treated as zero).
    """

    n_modes: int
    level: int
    nvec: np.ndarray          # (n_ado, K) int64
    plus_idx: np.ndarray      # (n_ado, K) int64
    minus_idx: np.ndarray     # (n_ado, K) int64

    @property
    def n_ado(self) -> int:
        return self.nvec.shape[0]

    @property
    def levels(self) -> np.ndarray:
        return self.nvec.sum(axis=1)


def build_hierarchy(n_modes: int, level: int, ado_budget: int | None = None) -> Hierarchy:
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if level < 0:
        raise ValueError("level must be >= 0")
    count = hierarchy_size(n_modes, level)
    if ado_budget is not None and count > ado_budget:
        raise CapacityExceeded(
            f"hierarchy needs {count} ADOs, budget is {ado_budget}"
        )

    def compositions(total, slots):
        if slots == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, slots - 1):
                yield (first,) + rest

    vectors = []
    for ell in range(level + 1):
        layer = sorted(compositions(ell, n_modes), reverse=True)
        vectors.extend(layer)
    index = {v: i for i, v in enumerate(vectors)}
    nvec = np.array(vectors, dtype=np.int64).reshape(len(vectors), n_modes)

    plus_idx = np.full((len(vectors), n_modes), -1, dtype=np.int64)
    minus_idx = np.full((len(vectors), n_modes), -1, dtype=np.int64)
    for i, v in enumerate(vectors):
        for k in range(n_modes):
            up = list(v)
            up[k] += 1
            plus_idx[i, k] = index.get(tuple(up), -1)
            if v[k] > 0:
                down = list(v)
                down[k] -= 1
                minus_idx[i, k] = index[tuple(down)]
    return Hierarchy(n_modes=n_modes, level=level, nvec=nvec,
                     plus_idx=plus_idx, minus_idx=minus_idx)


def heom_rhs(ados: np.ndarray, hier: Hierarchy, h_sys: np.ndarray,
             s_op: np.ndarray, exp: CorrelationExpansion,
             out: np.ndarray | None = None) -> np.ndarray:
    """Derivative of the full ADO stack under the time-local coupled equations."""
    if exp.n_modes != hier.n_modes:
        raise DimensionMismatch(
            f"expansion has {exp.n_modes} modes, hierarchy built for {hier.n_modes}"
        )
    if out is None:
        out = np.empty_like(ados)
    return heom_rhs_kernel(
        ados, out, np.ascontiguousarray(h_sys, dtype=complex),
        np.ascontiguousarray(s_op, dtype=complex),
        exp.zeta, exp.alpha, exp.alpha_tilde,
        hier.nvec.astype(np.float64), hier.plus_idx, hier.minus_idx,
    )


@dataclass
class Trajectory:
    """Sampled reduced density matrix, diabatic frame."""

    times_au: np.ndarray
    rho: np.ndarray            # (n_samples, d, d) complex
    n_ado: int
    hermiticity_defect: float  # max ||rho - rho^dag||_max before symmetrization

    @property
    def times_fs(self) -> np.ndarray:
        from .units import au_to_fs

        return au_to_fs(self.times_au)


_BLOWUP = 1.0e3


def propagate(rho0: np.ndarray, sys: SystemSpec, exp: CorrelationExpansion,
              level: int, dt_au: float = 0.25, t_final_fs: float = 200.0,
              sample_every_fs: float = 0.05, s_op: np.ndarray | None = None,
              ado_budget: int | None = None,
              hier: Hierarchy | None = None) -> Trajectory:
    """Fixed-step RK4 propagation from a factorized initial condition.

    All ADOs above level 0 start at zero. rho_S is recorded every
    `sample_every_fs` (rounded to a whole number of steps) and symmetrized,
    (rho + rho^dag)/2, at output only.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    if s_op is None:
        s_op = SIGMA_Z
    if hier is None:
        hier = build_hierarchy(exp.n_modes, level, ado_budget=ado_budget)
    if exp.n_modes != hier.n_modes:
        raise DimensionMismatch(
            f"expansion has {exp.n_modes} modes, hierarchy built for {hier.n_modes}"
        )
    h_sys = np.ascontiguousarray(sys.hamiltonian(), dtype=complex)
    s_op = np.ascontiguousarray(s_op, dtype=complex)
    nvec_f = hier.nvec.astype(np.float64)

    t_final_au = fs_to_au(t_final_fs)
    n_steps = max(1, int(round(t_final_au / dt_au)))
    stride = max(1, int(round(fs_to_au(sample_every_fs) / dt_au)))

    ados = np.zeros((hier.n_ado, d, d), dtype=complex)
    ados[0] = rho0
    k1, k2, k3, k4 = (np.empty_like(ados) for _ in range(4))
    work = np.empty_like(ados)

    def rhs(x, out):
        return heom_rhs_kernel(x, out, h_sys, s_op, exp.zeta, exp.alpha,
                               exp.alpha_tilde, nvec_f, hier.plus_idx,
                               hier.minus_idx)

    n_rec = n_steps // stride + 1
    times = np.empty(n_rec)
    rhos = np.empty((n_rec, d, d), dtype=complex)
    times[0] = 0.0
    rhos[0] = rho0
    rec = 1
    herm_defect = 0.0

    for step in range(1, n_steps + 1):
        rhs(ados, k1)
        np.multiply(k1, 0.5 * dt_au, out=work)
        work += ados
        rhs(work, k2)
        np.multiply(k2, 0.5 * dt_au, out=work)
        work += ados
        rhs(work, k3)
        np.multiply(k3, dt_au, out=work)
        work += ados
        rhs(work, k4)
        k2 += k3
        k2 *= 2.0
        k1 += k4
        k1 += k2
        k1 *= dt_au / 6.0
        ados += k1
        if step % stride == 0:
            r = ados[0]
            herm_defect = max(herm_defect, float(np.max(np.abs(r - r.conj().T))))
            times[rec] = step * dt_au
            rhos[rec] = 0.5 * (r + r.conj().T)
            rec += 1
            m = np.max(np.abs(ados))
            if not np.isfinite(m) or m > _BLOWUP:
                raise Diverged(
                    "ADO norm blew up; reduce dt or increase the Matsubara count"
                )
    return Trajectory(times_au=times[:rec], rho=rhos[:rec], n_ado=hier.n_ado,
                      hermiticity_defect=herm_defect)
