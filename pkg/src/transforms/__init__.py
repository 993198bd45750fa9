"""Hodograph and partial Legendre transforms near the boundary."""
