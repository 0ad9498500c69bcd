"""Command line interface and report writers."""
