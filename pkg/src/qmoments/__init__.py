"""qmoments: central values of quadratic Dirichlet L-functions at scale.

Two independent pipelines compute L(1/2, chi_d) over blocks of fundamental
discriminants (a binary-quadratic-form / K-Bessel route for d < 0 and a
smooth approximate functional equation for d > 0), the conjectural moment
polynomials are evaluated numerically by multi-dimensional contour residues,
and the analysis layer compares computed moments against the predictions.
"""

from .discriminants import (
    NEGATIVE,
    POSITIVE,
    Block,
    FundamentalFlags,
    blocks,
    is_fundamental,
    sieve_block,
)

__version__ = "0.1.0"

__all__ = [
    "NEGATIVE",
    "POSITIVE",
    "Block",
    "FundamentalFlags",
    "blocks",
    "is_fundamental",
    "sieve_block",
    "__version__",
]
