"""Spin-boson open-quantum-system dynamics with Bloch-volume non-Markovianity diagnostics."""

__version__ = "0.1.0"

from .bath import (BathSpec, CorrelationExpansion, LorentzianComponent,
                   SpectralDensity, correlation_quadrature, eval_spectral_density,
                   expand_correlation, renormalization_energy)
from .dynmap import (DynamicalMap, NonMarkovReport, analyze, canonical_rates,
                     default_probe_states, gamma_total, purity, reconstruct_map,
                     volume, witness_nonmarkov)
from .hierarchy import (Hierarchy, SystemSpec, Trajectory, build_hierarchy,
                        from_adiabatic, heom_rhs, propagate, to_adiabatic)
from .oracles import dephasing_exact, lindblad_constant_rate

__all__ = [
    "BathSpec", "CorrelationExpansion", "LorentzianComponent", "SpectralDensity",
    "correlation_quadrature", "eval_spectral_density", "expand_correlation",
    "renormalization_energy",
    "DynamicalMap", "NonMarkovReport", "analyze", "canonical_rates",
    "default_probe_states", "gamma_total", "purity", "reconstruct_map", "volume",
    "witness_nonmarkov",
    "Hierarchy", "SystemSpec", "Trajectory", "build_hierarchy", "from_adiabatic",
    "heom_rhs", "propagate", "to_adiabatic",
    "dephasing_exact", "lindblad_constant_rate",
]
