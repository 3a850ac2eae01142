"""Shared helpers for the test suite: seeded generators and brute-force oracles."""

import random
from fractions import Fraction

from padicdyn.padic import _fraction_valuation, _unit_residue


def random_nonzero_rational(rng: random.Random, height: int = 10**6) -> Fraction:
    num = rng.randint(1, height) * rng.choice((1, -1))
    den = rng.randint(1, height)
    return Fraction(num, den)


def random_rational(rng: random.Random, height: int = 10**6) -> Fraction:
    if rng.random() < 0.02:
        return Fraction(0)
    return random_nonzero_rational(rng, height)


def random_unit(rng: random.Random, p: int, height: int = 500) -> Fraction:
    """A rational with valuation exactly 0 at p."""
    while True:
        u = random_nonzero_rational(rng, height)
        if u.numerator % p and u.denominator % p:
            return u


def square_residue_set(p: int, k: int = 6) -> set[int]:
    """All residues of squares of units mod p**k."""
    mod = p**k
    return {w * w % mod for w in range(1, mod) if w % p}


def brute_force_is_square(x: Fraction, p: int, residues: set[int]) -> bool:
    """Squareness in Q_p by exhaustive residue squaring mod p**6."""
    v = _fraction_valuation(x, p)
    if v % 2:
        return False
    return _unit_residue(x, p, p**6) in residues
