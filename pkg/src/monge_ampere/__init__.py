"""Monge-Ampere solver, eigenvalue iteration, logarithmic flow and radial oracle."""
