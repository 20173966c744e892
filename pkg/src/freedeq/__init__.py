"""Deterministic-equivalent spectra for randomly rotated matrix models.

Subpackages by role: matcore (dense complex matrices), nclattice
(non-crossing partition combinatorics), weingarten (exact Haar-unitary
moment calculus), rectspace (block-structured matrix spaces), transforms
(Cauchy/R transforms of atomic measures), fdesolver (the fixed-point
solver), montecarlo (simulation of the actual random model), bounds
(transform-distance and Kolmogorov-distance estimates), cli (batch entry
point).
"""

__version__ = "0.1.0"
