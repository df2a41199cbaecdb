"""Exact Poisson commutant engine for Lie algebra reduction chains.

The package computes, in exact Q(i) arithmetic, the polynomial Poisson
algebra generated by the commutant of a subalgebra inside the symmetric
algebra of a Lie algebra.  The su(4) supermultiplet chain ships as the
built-in worked fixture.
"""

from .ring import (
    GaussianRational,
    Monomial,
    Polynomial,
    grlex_key,
    poly_add,
    poly_mul,
    poly_partial,
)
from .liealgebra import (
    LieAlgebraSpec,
    load_algebra,
    poisson_bracket,
    su4_supermultiplet,
)

__version__ = "0.1.0"
