"""Numerical laboratory for the axisymmetric nematic liquid-crystal angle
equation: barrier families, finite-time blow-up detection, the 1D Poiseuille
system with its maximum-principle counterexample, and Hopf-map Dirichlet
energies."""

__version__ = "0.1.0"
