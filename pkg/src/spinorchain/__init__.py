"""Solver and verification suite for rational so(2r) spin chain spectra.

Computes Baxter polynomial data by solving Wronskian determinant conditions
on a spinor triple, reconstructs the extended set of Q-functions through
pure-spinor formulas, evaluates transfer-matrix eigenvalues, and validates
completeness against independently computed representation multiplicities.
"""

__version__ = "0.1.0"
