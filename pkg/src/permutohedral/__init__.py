"""Exact combinatorics of the permutohedral toric varieties (chains of
projective lines with two white and n black points): ordered partitions, the
permutohedral fan, the cohomology ring and homology module, Poincare
polynomials, and matrix correlators of the twisted homology algebra.
"""

__version__ = "0.1.0"
