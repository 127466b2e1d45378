"""Exact symbolic computation and verification suite for a family of Virasoro modules.

Bracket convention used everywhere:

    [d_i, d_j] = (j - i) d_{i+j} + delta_{i,-j} ((i^3 - i) / 12) c

(the opposite of the common [L_i, L_j] = (i - j) L_{i+j}).
"""

__version__ = "0.1.0"
