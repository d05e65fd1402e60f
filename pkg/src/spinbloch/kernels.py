"""Hot inner loop of the hierarchy propagation.

Two interchangeable implementations of the ADO derivative sweep:

* a numba @njit kernel (parallel over ADOs, default when numba imports), and
* a pure-numpy vectorized fallback.

Selection: environment variable SPINBLOCH_BACKEND in {"auto", "numba",
"numpy"}, read at import; `set_backend` overrides at runtime (used by the
benchmark and the equivalence tests). Each ADO's derivative is accumulated
in a fixed mode order into its own output slot, so results are bit-for-bit
identical regardless of backend thread count.
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("SPINBLOCH_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"SPINBLOCH_BACKEND must be auto|numba|numpy, got {_requested!r}")

_HAVE_NUMBA = False
if _requested != "numpy":
    try:
        import numba
        from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
_backend = "numba" if _HAVE_NUMBA else "numpy"


def heom_rhs_numpy(rho, out, h_sys, s_op, zeta, alpha, alpha_tilde,
                   nvec, plus_idx, minus_idx):
    """Vectorized ADO derivative sweep; same contract as the numba kernel."""
    n_ado, d, _ = rho.shape
    n_modes = zeta.shape[0]

    # -i [H, rho_n]  +  i (n . zeta) rho_n
    np.einsum("ij,njk->nik", h_sys, rho, out=out)
    out -= np.einsum("nij,jk->nik", rho, h_sys)
    out *= -1j
    out += (1j * (nvec @ zeta))[:, None, None] * rho

    zero = np.zeros((d, d), dtype=rho.dtype)
    padded = np.concatenate([rho, zero[None]], axis=0)  # index -1 -> zero block

    # -i [S, sum_k rho_{n_k^+}]
    up = padded[plus_idx].sum(axis=1)
    out -= 1j * (s_op @ up - up @ s_op)

    # -i sum_k n_k (alpha_k S rho_{n_k^-} - alpha_tilde_k rho_{n_k^-} S)
    for k in range(n_modes):
        down = padded[minus_idx[:, k]]
        nk = nvec[:, k][:, None, None]
        out -= 1j * nk * (alpha[k] * (s_op @ down) - alpha_tilde[k] * (down @ s_op))
    return out


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _heom_rhs_numba(rho, out, h_sys, s_op, zeta, alpha, alpha_tilde,
                        nvec, plus_idx, minus_idx):
        n_ado, d, _ = rho.shape
        n_modes = zeta.shape[0]
        for a in prange(n_ado):
            r = rho[a]
            o = out[a]
            # -i [H, r]
            for i in range(d):
                for j in range(d):
                    acc = 0.0 + 0.0j
                    for m in range(d):
                        acc += h_sys[i, m] * r[m, j] - r[i, m] * h_sys[m, j]
                    o[i, j] = -1j * acc
            # + i (n . zeta) r
            nz = 0.0 + 0.0j
            for k in range(n_modes):
                nz += nvec[a, k] * zeta[k]
            for i in range(d):
                for j in range(d):
                    o[i, j] += 1j * nz * r[i, j]
            # -i [S, sum_k rho_{n_k^+}]
            for i in range(d):
                for j in range(d):
                    acc = 0.0 + 0.0j
                    for k in range(n_modes):
                        p = plus_idx[a, k]
                        if p < 0:
                            continue
                        for m in range(d):
                            acc += s_op[i, m] * rho[p, m, j] - rho[p, i, m] * s_op[m, j]
                    o[i, j] += -1j * acc
            # -i sum_k n_k (alpha_k S rho_- - alpha_tilde_k rho_- S)
            for k in range(n_modes):
                q = minus_idx[a, k]
                if q < 0:
                    continue
                nk = nvec[a, k]
                for i in range(d):
                    for j in range(d):
                        acc = 0.0 + 0.0j
                        for m in range(d):
                            acc += alpha[k] * s_op[i, m] * rho[q, m, j]
                            acc -= alpha_tilde[k] * rho[q, i, m] * s_op[m, j]
                        o[i, j] += -1j * nk * acc
        return out


def backend_name() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Force a backend; "numba" raises if numba is unavailable."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba could not be imported")
    _backend = name


def set_num_threads(n: int) -> None:
    """Thread count for the numba kernel; a no-op on the numpy fallback.

    Clamped to the number of threads numba actually has, so asking for more
    workers than the machine offers degrades gracefully.
    """
    if _HAVE_NUMBA and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def heom_rhs_kernel(rho, out, h_sys, s_op, zeta, alpha, alpha_tilde,
                    nvec, plus_idx, minus_idx):
    if _backend == "numba":
        return _heom_rhs_numba(rho, out, h_sys, s_op, zeta, alpha, alpha_tilde,
                               nvec, plus_idx, minus_idx)
    return heom_rhs_numpy(rho, out, h_sys, s_op, zeta, alpha, alpha_tilde,
                          nvec, plus_idx, minus_idx)
