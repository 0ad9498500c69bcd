"""End-to-end verification runs."""
