"""charlab: a computational laboratory for Dirichlet character sums.

Implements character groups with exact root-of-unity arithmetic,
maximal partial sums M(chi) and family scans, the odd-order savings
exponent and its correlation/distance machinery, truncated Euler
products for prime-reciprocal constants in arithmetic progressions,
and an extremal-character construction pipeline, all behind a
reproducible CSV/JSON command line.
"""

from ._kernels import BACKEND as kernel_backend
from .characters import (
    CharacterGroup,
    DirichletCharacter,
    UnitValue,
    build_group,
    enumerate_characters,
    parse_character,
)
from .primes import PrimeTable, factorize, primitive_root, sieve_primes

__version__ = "0.1.0"

__all__ = [
    "CharacterGroup",
    "DirichletCharacter",
    "PrimeTable",
    "UnitValue",
    "build_group",
    "enumerate_characters",
    "factorize",
    "kernel_backend",
    "parse_character",
    "primitive_root",
    "sieve_primes",
    "__version__",
]
