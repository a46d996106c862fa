"""Finite covers of random 3-manifolds: exact enumeration and Monte Carlo
estimates for random Heegaard splittings, random balanced presentations,
symplectic homology statistics and random gluings of simplices."""

__version__ = "0.1.0"
