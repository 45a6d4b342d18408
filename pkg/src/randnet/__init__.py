"""Randomly connected diffusions with state-dependent couplings: network
simulation, Gaussian-tilted mean-field limit and convergence diagnostics."""

__version__ = "0.1.0"
