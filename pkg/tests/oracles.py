"""Brute-force oracles, independent of the library formulas."""

from fractions import Fraction
from functools import lru_cache


def _residue(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


def _val(x: Fraction, p: int) -> int:
    n, d, v = x.numerator, x.denominator, 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _reduce(x: Fraction, p: int) -> Fraction:
    # x / p^(2k) so that the valuation is 0 or 1
    v = _val(x, p)
    return x / Fraction(p) ** (v - v % 2)


@lru_cache(maxsize=None)
def _squares(mod: int) -> frozenset:
    return frozenset(z * z % mod for z in range(mod))


def hilbert_bruteforce(a, b, p: int) -> int:
    """+1 iff z^2 = a x^2 + b y^2 has a primitive solution mod p^3."""
    a, b = _reduce(Fraction(a), p), _reduce(Fraction(b), p)
    mod = p ** 3
    ra, rb = _residue(a, mod), _residue(b, mod)
    sq = _squares(mod)
    for x in range(mod):
        ax = ra * x * x
        for y in range(mod):
            if x % p == 0 and y % p == 0:
                continue
            if (ax + rb * y * y) % mod in sq:
                return 1
    # (x, y) divisible by p and z a unit is impossible: z^2 = 0 mod p^2
    return -1


def is_square_mod(u: int, p: int) -> bool:
    return any(x * x % p == u % p for x in range(1, p))
