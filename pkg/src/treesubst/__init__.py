"""Tree substitutions for a family of substitutive shifts.

The package builds, stage by stage, the finite trees T_n^s produced by a
tree substitution on 2d-2 edge colors, realizes them isometrically inside
a free product of d copies of the real line with exact arithmetic in
Z[rho] (rho the real root of x^d = x + 1), and cross-checks the metric
picture against the combinatorics of the word substitution

    1 -> 12,  k -> k+1 (2 <= k < d),  d -> 1

on d letters: factor complexity, bispecial words, prefix-suffix
developments, cylinder measures and the arc/partition correspondence.
"""

__version__ = "0.1.0"
