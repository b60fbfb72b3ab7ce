"""Quantum delta-kicked harmonic oscillator: Fock-basis and phase-space
lattice propagation, quantum-resonance classification, and spectral
observables."""

from . import fock, lattice, model, output, specfun, verify

__all__ = ["fock", "lattice", "model", "output", "specfun", "verify"]
__version__ = "0.1.0"
