"""Closed-form Green functions of balls."""
