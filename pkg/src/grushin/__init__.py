"""Degenerate linear model u_nn + x_n^m Laplacian u = f on the periodic strip."""
