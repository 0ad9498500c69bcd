"""Finite-difference clamped polyharmonic solver."""
