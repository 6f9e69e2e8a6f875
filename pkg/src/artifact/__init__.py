"""Finite-volume generalized Riemann problem solvers with two-stage fourth-order stepping."""

__version__ = "0.1.0"
