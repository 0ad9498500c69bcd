"""Fundamental solutions of the polyharmonic operator."""
