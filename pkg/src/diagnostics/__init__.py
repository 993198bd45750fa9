"""Asymptotic, analyticity and combinatorial diagnostics."""
