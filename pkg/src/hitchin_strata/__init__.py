"""Discrete invariants of singular SL(2,C) Hitchin fibers.

Exact-arithmetic stratification of singular fibers by σ-divisors, limit
weight maps and their boundary branches, reducible-fiber exotic weights,
invariants of rank-1 torsion-free modules at A_n curve singularities, and
a numerical harmonic-metric lab on a flat torus.
"""

__version__ = "0.1.0"
