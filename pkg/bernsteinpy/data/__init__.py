"""Config readiness and Monte Carlo statistics."""
