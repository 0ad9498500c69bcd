"""Right-hand sides of the pointwise estimates and ratio statistics."""
