"""Solver and verifier for the J-equation tr(gfrak_u^{-1} g) = n/psi on flat tori and boxes."""

__version__ = "0.1.0"
