"""Exact deformation calculus for Filippov (n-Lie) algebras.

The package computes with skew n-ary brackets over the rationals: fundamental
identity checking, the graded Lie algebra of multiderivations, deformation
cohomology, formal deformations with their obstruction calculus, Nijenhuis
operators, and a polynomial model of Filippov algebroids.  All arithmetic is
exact; every "does this identity hold" question is decided by rational
equality, never by a tolerance.
"""

__version__ = "0.1.0"
