"""Number-theoretic primitives: primes, Chebyshev polynomials, class numbers, q-series."""

from .chebyshev import chebyshev_X, chebyshev_X_int, chebyshev_X_table
from .classnum import HurwitzCache, hurwitz
from .qseries import QSeries, delta_qexp, eisenstein_qexp
from .sieve import PrimeTable, first_primes, prime_pi, sieve

__all__ = [
    "HurwitzCache",
    "PrimeTable",
    "QSeries",
    "chebyshev_X",
    "chebyshev_X_int",
    "chebyshev_X_table",
    "delta_qexp",
    "eisenstein_qexp",
    "first_primes",
    "hurwitz",
    "prime_pi",
    "sieve",
]
