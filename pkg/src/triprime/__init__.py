"""Verification toolkit for products of three primes in arithmetic progressions."""

from .arith import UnitGroup, euler_phi, f0, factor, jacobi, unit_group
from .characters import QuadraticCharacter, l_one_certified, real_characters
from .sieve import class_spectrum, primes_up_to
from .sumsets import ClassSet, product_set, stabilizer
from .verifier import coverage, minimal_prime_threshold, witness

__version__ = "0.1.0"

__all__ = [
    "UnitGroup", "euler_phi", "f0", "factor", "jacobi", "unit_group",
    "QuadraticCharacter", "l_one_certified", "real_characters",
    "class_spectrum", "primes_up_to",
    "ClassSet", "product_set", "stabilizer",
    "coverage", "minimal_prime_threshold", "witness",
]
