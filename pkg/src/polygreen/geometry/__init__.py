"""Bounded domains, boundary distances and point-pair sampling."""
