import numpy as np
import pytest

from spinbloch.bath import (BathSpec, CorrelationExpansion, LorentzianComponent,
                            SpectralDensity, correlation_quadrature,
                            eval_spectral_density, expand_correlation,
                            expansion_error, renormalization_energy)
from spinbloch.errors import InvalidBath
from spinbloch.units import KB_AU, fs_to_au


def test_spectral_density_at_zero(table1_density):
    assert eval_spectral_density(table1_density, 0.0) == 0.0


def test_spectral_density_reference_value(table1_density):
    # direct arithmetic evaluation of the two-Lorentzian sum at the first peak center
    assert eval_spectral_density(table1_density, 8.0e-4) == pytest.approx(9.049e-4, rel=1e-3)


def test_antisymmetry_random_frequencies(table1_density, rng):
    omega = rng.uniform(0.0, 0.02, size=100)
    np.testing.assert_allclose(
        table1_density(-omega), -table1_density(omega), rtol=0, atol=1e-18)


def test_nonnegative_on_positive_axis(table1_density):
    omega = np.linspace(0.0, 0.05, 2000)
    assert np.all(table1_density(omega) >= 0.0)


def test_component_validation():
    with pytest.raises(InvalidBath):
        LorentzianComponent(-1e-12, 8e-4, 1.4e-3)
    with pytest.raises(InvalidBath):
        LorentzianComponent(1e-12, 8e-4, 0.0)
    # zero amplitude is allowed (switched-off coupling)
    LorentzianComponent(0.0, 8e-4, 1.4e-3)


def test_temperature_validation(table1_density):
    with pytest.raises(InvalidBath):
        BathSpec(table1_density, temperature=0.0)
    assert BathSpec(table1_density, 300.0).beta == pytest.approx(1052.58, rel=1e-4)


def test_quadrature_t0_real_positive(table1_bath):
    c0 = correlation_quadrature(table1_bath, 0.0)
    assert c0.real > 0.0
    assert abs(c0.imag) < 1e-9 * c0.real


def test_quadrature_stationarity(table1_bath, rng):
    t = rng.uniform(0.0, 6000.0, size=20)
    c_pos = correlation_quadrature(table1_bath, t)
    c_neg = correlation_quadrature(table1_bath, -t)
    np.testing.assert_allclose(c_neg, np.conj(c_pos),
                               atol=1e-8 * np.max(np.abs(c_pos)), rtol=0)


def test_correlation_decay_beyond_100fs(table1_bath):
    t = np.linspace(0.0, fs_to_au(200.0), 801)
    c = correlation_quadrature(table1_bath, t)
    late = np.abs(c[t > fs_to_au(100.0)])
    assert np.max(late) / abs(c[0]) < 0.05


class TestExpansion:
    def test_mode_count_and_decay(self, table1_bath):
        exp = expand_correlation(
            BathSpec(table1_bath.spectral_density, 300.0, n_matsubara=5))
        assert exp.n_modes == 2 * 2 + 5
        assert np.all(exp.zeta.imag > 0.0)

    def test_first_matsubara_frequency(self, table1_bath):
        exp = expand_correlation(
            BathSpec(table1_bath.spectral_density, 300.0, n_matsubara=1))
        nu1 = exp.zeta[-1].imag
        assert nu1 == pytest.approx(2.0 * np.pi * KB_AU * 300.0, rel=1e-12)
        assert nu1 == pytest.approx(5.969e-3, rel=1e-3)

    def test_c0_real_positive(self, table1_bath):
        exp = expand_correlation(table1_bath)
        c0 = complex(exp.evaluate(0.0))
        assert c0.real > 0.0
        assert abs(c0.imag) < 1e-12 * c0.real

    def test_matches_quadrature_at_convergence(self, table1_bath):
        exp = expand_correlation(table1_bath)  # auto Matsubara count
        assert expansion_error(table1_bath, exp) < 1e-3

    def test_error_decreases_with_matsubara_count(self, table1_bath):
        errs = []
        for n in (0, 2, 6):
            exp = expand_correlation(
                BathSpec(table1_bath.spectral_density, 300.0, n_matsubara=n))
            errs.append(expansion_error(table1_bath, exp, n_check=200))
        assert errs[0] > errs[1] > errs[2]

    def test_conjugate_series(self, table1_bath):
        exp = expand_correlation(table1_bath)
        t = np.linspace(0.0, fs_to_au(100.0), 101)
        np.testing.assert_allclose(exp.evaluate_conjugate(t),
                                   np.conj(exp.evaluate(t)), rtol=0, atol=1e-18)

    def test_modes_decay_to_zero(self, table1_bath):
        exp = expand_correlation(table1_bath)
        far = abs(complex(exp.evaluate(fs_to_au(2000.0))))
        assert far < 1e-6 * abs(complex(exp.evaluate(0.0)))


class TestRenormalization:
    def test_zero_amplitude(self, table1_density):
        zero = table1_density.scaled(0.0)
        assert renormalization_energy(zero) == 0.0

    def test_finite_positive(self, table1_density):
        lam = renormalization_energy(table1_density)
        assert lam == pytest.approx(7.387e-4, rel=1e-3)

    def test_linearity_in_amplitude(self, table1_density):
        lam = renormalization_energy(table1_density)
        lam2 = renormalization_energy(table1_density.scaled(2.0))
        assert lam2 == pytest.approx(2.0 * lam, rel=1e-10)
