"""Structured bosonic bath: spectral density, correlation function, exponential expansion.

The spectral density is a sum of antisymmetrized Lorentzian components,

    J(w) = sum_l  w * delta_l / ( [(w - wc_l)^2 + gw_l^2] [(w + wc_l)^2 + gw_l^2] ),

odd in w by construction. The finite-temperature bath correlation function

    C(t) = (1/pi) int_{-inf}^{inf}  exp(-i w t) J(w) / (1 - exp(-beta w)) dw

is computed two independent ways: by direct quadrature, and as an exponential
series obtained from the residues of J(w) (two poles per Lorentzian in the
lower half-plane) plus the poles of the Bose function at the Matsubara
frequencies nu_n = 2 pi n / beta. The quadrature route is the oracle that
validates the residue bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidBath, QuadratureNotConverged
from .units import beta_from_temperature, fs_to_au


@dataclass(frozen=True)
class LorentzianComponent:
    """One antisymmetrized Lorentzian: amplitude, center frequency, width (a.u.)."""

    delta: float
    omega_c: float
    gamma_w: float

    def __post_init__(self):
        # delta == 0 is allowed: it models switched-off coupling in control runs
        if self.delta < 0.0:
            raise InvalidBath(f"delta must be >= 0, got {self.delta}")
        if self.omega_c <= 0.0:
            raise InvalidBath(f"omega_c must be > 0, got {self.omega_c}")
        if self.gamma_w <= 0.0:
            raise InvalidBath(f"gamma_w must be > 0, got {self.gamma_w}")


@dataclass(frozen=True)
class SpectralDensity:
    components: tuple[LorentzianComponent, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise InvalidBath("spectral density needs at least one component")

    def __call__(self, omega):
        """J(omega) for real (scalar or array) omega."""
        return self.evaluate_complex(omega).real

    def evaluate_complex(self, z):
        """Analytic continuation of J to complex frequency (used for Bose-pole residues)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.components:
            out = out + z * c.delta / (
                ((z - c.omega_c) ** 2 + c.gamma_w**2)
                * ((z + c.omega_c) ** 2 + c.gamma_w**2)
            )
        if out.ndim == 0:
            return complex(out)
        return out

    def derivative_at_zero(self) -> float:
        """J'(0), the finite slope at the removable zero of J."""
        return sum(
            c.delta / (c.omega_c**2 + c.gamma_w**2) ** 2 for c in self.components
        )

    def scaled(self, factor: float) -> "SpectralDensity":
        return SpectralDensity(
            tuple(
                LorentzianComponent(c.delta * factor, c.omega_c, c.gamma_w)
                for c in self.components
            )
        )


@dataclass(frozen=True)
class BathSpec:
    """Spectral density plus thermal state; n_matsubara=None means auto-converge."""

    spectral_density: SpectralDensity
    temperature: float
    n_matsubara: int | None = None

    def __post_init__(self):
        if self.temperature <= 0.0:
            raise InvalidBath("temperature must be > 0 (Matsubara expansion needs finite beta)")
        if self.n_matsubara is not None and self.n_matsubara < 0:
            raise InvalidBath("n_matsubara must be >= 0")

    @property
    def beta(self) -> float:
        return beta_from_temperature(self.temperature)


@dataclass(frozen=True)
class CorrelationExpansion:
    """C(t) = sum_k alpha_k exp(i zeta_k t), C*(t) = sum_k alpha_tilde_k exp(i zeta_k t), t >= 0."""

    alpha: np.ndarray
    alpha_tilde: np.ndarray
    zeta: np.ndarray
    n_matsubara: int = 0

    def __post_init__(self):
        for name in ("alpha", "alpha_tilde", "zeta"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex))
        if not (len(self.alpha) == len(self.alpha_tilde) == len(self.zeta)):
            raise ValueError("alpha, alpha_tilde, zeta must have equal length")

    @property
    def n_modes(self) -> int:
        return len(self.zeta)

    def evaluate(self, t_au):
        t_au = np.asarray(t_au, dtype=float)
        return np.exp(1j * np.multiply.outer(t_au, self.zeta)) @ self.alpha

    def evaluate_conjugate(self, t_au):
        t_au = np.asarray(t_au, dtype=float)
        return np.exp(1j * np.multiply.outer(t_au, self.zeta)) @ self.alpha_tilde


def eval_spectral_density(sd: SpectralDensity, omega):
    return sd(omega)


# quadrature window: cover every Lorentzian far into its power-law tail.
# The tail falls off only as 1/w^3, so a generous multiple of the width is
# needed for ~1e-5 relative accuracy of C(t).
_WINDOW_WIDTHS = 200.0


def _bose_weighted_integrand(sd: SpectralDensity, beta: float, omega: np.ndarray):
    out = np.empty_like(omega)
    small = np.abs(omega) < 1e-12
    safe = np.where(small, 1.0, omega)
    out = sd(safe) / (1.0 - np.exp(-beta * safe))
    out[small] = sd.derivative_at_zero() / beta
    return out


def _quadrature_window(sd: SpectralDensity) -> float:
    return max(c.omega_c + _WINDOW_WIDTHS * c.gamma_w for c in sd.components)


def correlation_quadrature(bath: BathSpec, t, rtol: float = 1e-6,
                           max_points: int = 1 << 20):
    """C(t) by adaptive composite Simpson quadrature of the Bose-weighted spectral density.

    `t` is in atomic units, scalar or array. Successive grid doublings must
    agree to `rtol` (relative to max |C|) or QuadratureNotConverged is raised.
    """
    t_au = np.atleast_1d(np.asarray(t, dtype=float))
    sd = bath.spectral_density
    beta = bath.beta
    wmax = _quadrature_window(sd)

    prev = None
    n = 1 << 15
    while n <= max_points:
        omega = np.linspace(-wmax, wmax, n + 1)
        f = _bose_weighted_integrand(sd, beta, omega)
        h = omega[1] - omega[0]
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= h / 3.0
        wf = w * f
        out = np.empty(len(t_au), dtype=complex)
        chunk = max(1, (1 << 22) // (n + 1))
        for i in range(0, len(t_au), chunk):
            out[i : i + chunk] = np.exp(
                -1j * np.multiply.outer(t_au[i : i + chunk], omega)
            ) @ wf
        out /= np.pi
        if prev is not None:
            scale = np.max(np.abs(out))
            if np.max(np.abs(out - prev)) <= rtol * scale:
                return out[0] if np.ndim(t) == 0 else out
        prev = out
        n *= 2
    raise QuadratureNotConverged(
        f"correlation quadrature did not converge within {max_points} points"
    )


def _lorentzian_pole_modes(sd: SpectralDensity, beta: float):
    """Exponential modes from the lower-half-plane poles of J(w), for t >= 0.

    Closing the Fourier contour downward picks up, per Lorentzian, the simple
    poles w_p = +-wc - i*gw. Each contributes  -2i * nbar(w_p) * Res_J(w_p)
    with exponent exp(i zeta t), zeta = -w_p (Im zeta = gw > 0).
    Conjugation maps the +wc pole of a component onto its -wc partner, which
    is how alpha_tilde is filled while reusing the same zeta set.
    """
    alpha, zeta = [], []
    for c in sd.components:
        for sign in (+1.0, -1.0):
            wp = sign * c.omega_c - 1j * c.gamma_w
            other = (wp + sign * c.omega_c) ** 2 + c.gamma_w**2
            # only component c is singular at wp; the other terms of J are analytic there
            res_j = wp * c.delta / ((-2j * c.gamma_w) * other)
            nbar = 1.0 / (1.0 - np.exp(-beta * wp))
            alpha.append(-2j * res_j * nbar)
            zeta.append(-wp)
    # pairs are adjacent (+, -): alpha_tilde[k] = conj(alpha[partner])
    alpha = np.array(alpha)
    zeta = np.array(zeta)
    tilde = np.empty_like(alpha)
    tilde[0::2] = np.conj(alpha[1::2])
    tilde[1::2] = np.conj(alpha[0::2])
    return alpha, tilde, zeta


def _matsubara_modes(sd: SpectralDensity, beta: float, n_matsubara: int):
    """Modes from the Bose-function poles at w = -i nu_n, nu_n = 2 pi n / beta."""
    if n_matsubara == 0:
        empty = np.zeros(0, dtype=complex)
        return empty, empty.copy(), empty.copy()
    n = np.arange(1, n_matsubara + 1)
    nu = 2.0 * np.pi * n / beta
    alpha = (-2j / beta) * sd.evaluate_complex(-1j * nu)
    zeta = 1j * nu
    return alpha, np.conj(alpha), zeta


def _modes_for(sd: SpectralDensity, beta: float, n_matsubara: int) -> CorrelationExpansion:
    a_l, at_l, z_l = _lorentzian_pole_modes(sd, beta)
    a_m, at_m, z_m = _matsubara_modes(sd, beta, n_matsubara)
    return CorrelationExpansion(
        alpha=np.concatenate([a_l, a_m]),
        alpha_tilde=np.concatenate([at_l, at_m]),
        zeta=np.concatenate([z_l, z_m]),
        n_matsubara=n_matsubara,
    )


def expand_correlation(bath: BathSpec, rel_tol: float = 1e-3,
                       t_window_fs: float = 200.0, max_matsubara: int = 20,
                       n_check: int = 400) -> CorrelationExpansion:
    """Exponential expansion of C(t) with 2M Lorentzian-pole modes plus Matsubara modes.

    If bath.n_matsubara is set it is used as-is. Otherwise the (plain, not
    accelerated) Matsubara series is lengthened until the expansion matches
    the quadrature C(t) to `rel_tol` in sup norm over [0, t_window_fs], or
    `max_matsubara` is reached.
    """
    for c in bath.spectral_density.components:
        if c.gamma_w <= 0.0:
            raise InvalidBath("zero-width Lorentzian puts a pole on the real axis")

    if bath.n_matsubara is not None:
        return _modes_for(bath.spectral_density, bath.beta, bath.n_matsubara)

    t_au = np.linspace(0.0, fs_to_au(t_window_fs), n_check + 1)
    c_quad = correlation_quadrature(bath, t_au)
    scale = np.max(np.abs(c_quad))
    best = None
    for n_mats in range(0, max_matsubara + 1):
        exp = _modes_for(bath.spectral_density, bath.beta, n_mats)
        err = np.max(np.abs(exp.evaluate(t_au) - c_quad)) / scale
        if best is None or err < best[0]:
            best = (err, exp)
        if err < rel_tol:
            return exp
    return best[1]


def expansion_error(bath: BathSpec, exp: CorrelationExpansion,
                    t_window_fs: float = 200.0, n_check: int = 400) -> float:
    """Relative sup-norm distance between the mode expansion and quadrature C(t)."""
    t_au = np.linspace(0.0, fs_to_au(t_window_fs), n_check + 1)
    c_quad = correlation_quadrature(bath, t_au)
    return float(np.max(np.abs(exp.evaluate(t_au) - c_quad)) / np.max(np.abs(c_quad)))


def renormalization_energy(sd: SpectralDensity, rtol: float = 1e-8) -> float:
    """lambda = (1/pi) int_0^inf J(w)/w dw, logged for diagnostics.

    For sigma_z coupling the counter term is proportional to the identity and
    has no effect on the reduced dynamics, so it is never added to the
    propagated Hamiltonian.
    """
    wmax = _quadrature_window(sd)
    prev = None
    n = 1 << 14
    while n <= (1 << 21):
        omega = np.linspace(0.0, wmax, n + 1)
        f = np.empty_like(omega)
        f[1:] = sd(omega[1:]) / omega[1:]
        f[0] = sd.derivative_at_zero()
        val = np.trapezoid(f, omega) / np.pi
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return float(val)
        prev = val
        n *= 2
    raise QuadratureNotConverged("renormalization energy quadrature did not converge")
