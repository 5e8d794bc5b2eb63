"""Local invariants at an odd prime p.

Square classes, Legendre and Hilbert symbols, the quadratic character of
E/F, diagonalization of quadratic spaces, and Weil indices.  Every value
lives in the group of eighth roots of unity, encoded by ``Mu8``.

The additive character is psi_c(x) = exp(2*pi*i*frac_p(c*x)), trivial on Z_p
when c is a p-adic unit.  eta is psi_c with c halved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from gmpy2 import mpq

from .exact import Matrix, QQ, as_fraction, to_fraction, to_fraction_rows, to_mpq_rows


class NotAUnit(ValueError):
    pass


class ZeroArgument(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class PrecisionTooLow(ValueError):
    pass


class SnapFailure(ArithmeticError):
    pass


class CalibrationError(AssertionError):
    """Closed-form Weil index disagrees with the Gauss-sum oracle."""


class InvalidContext(ValueError):
    pass


class Mu8:
    """The eighth root of unity exp(2*pi*i*exponent/8)."""

    __slots__ = ("exponent",)

    def __init__(self, exponent: int = 0):
        self.exponent = exponent % 8

    @classmethod
    def from_sign(cls, s: int) -> Mu8:
        if s == 1:
            return cls(0)
        if s == -1:
            return cls(4)
        raise ValueError(f"not a sign: {s}")

    @property
    def sign(self) -> int:
        if self.exponent == 0:
            return 1
        if self.exponent == 4:
            return -1
        raise ValueError(f"{self} is not +-1")

    def __mul__(self, other):
        return Mu8(self.exponent + other.exponent)

    def __truediv__(self, other):
        return Mu8(self.exponent - other.exponent)

    def __pow__(self, k: int):
        return Mu8(self.exponent * k)

    def inverse(self):
        return Mu8(-self.exponent)

    def __eq__(self, other):
        if isinstance(other, Mu8):
            return self.exponent == other.exponent
        if other in (1, -1):
            return self.exponent == (0 if other == 1 else 4)
        return NotImplemented

    def __hash__(self):
        return hash(("mu8", self.exponent))

    def __complex__(self):
        return cmath.exp(2j * math.pi * self.exponent / 8)

    def __repr__(self):
        return f"Mu8({self.exponent})"


ONE = Mu8(0)


def mu8_product(values) -> Mu8:
    return Mu8(sum(v.exponent for v in values))


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int) -> int:
    x = as_fraction(x)
    if not x:
        raise ZeroArgument("valuation of zero")
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    x = as_fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def mod_p_power(x, p: int, e: int) -> int:
    """Residue of a p-integral rational modulo p**e."""
    x = as_fraction(x)
    mod = p ** e
    return x.numerator * pow(x.denominator, -1, mod) % mod


def legendre(u, p: int) -> Mu8:
    u = as_fraction(u)
    if not u or valuation(u, p) != 0:
        raise NotAUnit(f"{u} is not a unit at {p}")
    r = mod_p_power(u, p, 1)
    return ONE if pow(r, (p - 1) // 2, p) == 1 else Mu8(4)


def square_class(x, p: int) -> tuple[int, int]:
    """(valuation parity, Legendre sign of the unit part) at odd p."""
    return (valuation(x, p) % 2, legendre(unit_part(x, p), p).sign)


def is_local_square(x, p: int) -> bool:
    return square_class(x, p) == (0, 1)


def hilbert_symbol(a, b, p: int) -> Mu8:
    """(a, b)_p for odd p, by the valuation/Legendre formula."""
    a, b = as_fraction(a), as_fraction(b)
    if not a or not b:
        raise ZeroArgument("Hilbert symbol of zero")
    al, be = valuation(a, p), valuation(b, p)
    u, v = unit_part(a, p), unit_part(b, p)
    e = Mu8(4 * (al * be * ((p - 1) // 2)))
    return e * legendre(u, p) ** be * legendre(v, p) ** al


def smallest_nonresidue(p: int) -> int:
    return next(u for u in range(2, p) if pow(u, (p - 1) // 2, p) != 1)


def square_class_reps(p: int) -> list[Fraction]:
    u = smallest_nonresidue(p)
    return [Fraction(1), Fraction(u), Fraction(p), Fraction(u * p)]


@lru_cache(maxsize=None)
def _norm_residues(d0: int, p: int) -> frozenset:
    mod = p ** 3
    sq = [a * a % mod for a in range(mod)]
    return frozenset((x - d0 * y) % mod for x in set(sq) for y in set(sq))


def local_norm_search(y, delta, p: int) -> bool:
    """Whether y is a norm from Q_p(sqrt(delta)), by exhaustive search mod p^3.

    Both arguments are first reduced to the form unit or p*unit; for such y
    a solution of a^2 - delta b^2 = y mod p^3 lifts to Z_p.  Independent of
    the Hilbert symbol formula.
    """
    y, delta = as_fraction(y), as_fraction(delta)
    if not y or not delta:
        raise ZeroArgument("norm search needs nonzero inputs")
    vy, vd = valuation(y, p), valuation(delta, p)
    y0 = unit_part(y, p) * p ** (vy % 2)
    d0 = unit_part(delta, p) * p ** (vd % 2)
    return mod_p_power(y0, p, 3) in _norm_residues(mod_p_power(d0, p, 3), p)

# -- Weil indices -------------------------------------------------------------

def _weil_index_closed(b: Fraction, p: int) -> Mu8:
    # gamma(psi(b x^2)) for psi of conductor Z_p: trivial for even valuation;
    # otherwise the normalized Gauss sum (w/p) * (1 or i) with w the unit part
    v = valuation(b, p)
    if v % 2 == 0:
        return ONE
    base = Mu8(0) if p % 4 == 1 else Mu8(2)
    return base * legendre(unit_part(b, p), p)


def weil_index_gauss_oracle(a, p: int, character_scale=1, N: int | None = None,
                            tol: float = 1e-6) -> Mu8:
    """Weil index of x -> psi_c(a x^2) from truncated Gauss sums.

    For b = a*c of valuation v and level N, integrates psi(b x^2) over the
    ball p^-k Z_p with k = ceil((N + v)/2); the integrand has period
    p^M in the rescaled variable, M = 2k - v, giving
    S = sum_{t mod p^M} exp(2 pi i frac(w t^2 / p^M)).  Levels N and N+2 must
    snap to the same eighth root of unity.
    """
    b = as_fraction(a) * as_fraction(character_scale)
    if not b:
        raise ZeroArgument("Weil index of a zero form")
    v = valuation(b, p)
    lo = max(1, v + 3)
    if N is None:
        N = lo
    if N < lo:
        raise PrecisionTooLow(f"need N >= {lo}, got {N}")
    snapped = [_gauss_phase(b, p, v, level, tol) for level in (N, N + 2)]
    if snapped[0] != snapped[1]:
        raise SnapFailure(f"Gauss sums not stationary: {snapped}")
    return snapped[0]


def _gauss_phase(b: Fraction, p: int, v: int, level: int, tol: float) -> Mu8:
    k = -(-(level + v) // 2)
    M = 2 * k - v
    return _gauss_sum_phase(mod_p_power(unit_part(b, p), p, M), p, M, tol)


@lru_cache(maxsize=4096)
def _gauss_sum_phase(w: int, p: int, M: int, tol: float) -> Mu8:
    # pure in (w mod p^M, p, M): memoized, repeated samples cost nothing
    mod = p ** M
    t = np.arange(mod, dtype=np.int64)
    r = (t * t) % mod * w % mod
    s = np.exp(2j * np.pi * r / mod).sum()
    if abs(s) < 1e-9 * math.sqrt(mod):
        raise SnapFailure("Gauss sum vanished")
    z = s / abs(s)
    for e in range(8):
        if abs(z - cmath.exp(2j * math.pi * e / 8)) < tol:
            return Mu8(e)
    raise SnapFailure(f"{z} is not an eighth root of unity")


@lru_cache(maxsize=None)
def calibrate_weil_index(p: int, character_scale: Fraction) -> bool:
    """Check the closed form against the oracle on the four square classes."""
    for rep in square_class_reps(p):
        a = rep / character_scale
        closed = _weil_index_closed(a * character_scale, p)
        oracle = weil_index_gauss_oracle(a, p, character_scale)
        if closed != oracle:
            raise CalibrationError(
                f"p={p} a={a}: closed form {closed} vs Gauss sum {oracle}")
    return True


@dataclass(frozen=True)
class LocalContext:
    """Prime p, Delta (a non-square at p) and the scale c of psi."""

    p: int
    delta: Fraction
    psi_scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        object.__setattr__(self, "psi_scale", as_fraction(self.psi_scale))
        if not is_odd_prime(self.p):
            raise InvalidContext(f"p={self.p} is not an odd prime")
        if not self.delta:
            raise InvalidContext("Delta must be nonzero")
        if is_local_square(self.delta, self.p):
            raise InvalidContext(f"Delta={self.delta} is a square in Q_{self.p}")
        if not self.psi_scale:
            raise InvalidContext("psi scale must be nonzero")
        calibrate_weil_index(self.p, self.psi_scale)
        calibrate_weil_index(self.p, self.eta_scale)

    @property
    def eta_scale(self) -> Fraction:
        return self.psi_scale / 2

    @property
    def unramified(self) -> bool:
        """E/F unramified iff Delta has even valuation."""
        return valuation(self.delta, self.p) % 2 == 0


def epsilon_EF(x, ctx: LocalContext) -> Mu8:
    """Quadratic character of E/F: x -> (x, Delta)_p."""
    return hilbert_symbol(x, ctx.delta, ctx.p)


def weil_index_scalar(a, ctx: LocalContext, character_scale=None) -> Mu8:
    """gamma_F(psi_c o a x^2); c defaults to the scale of eta."""
    c = ctx.eta_scale if character_scale is None else as_fraction(character_scale)
    a = as_fraction(a)
    if not a:
        raise ZeroArgument("Weil index of a zero form")
    return _weil_index_closed(a * c, ctx.p)


def gamma_eta(y, ctx: LocalContext) -> Mu8:
    """gamma_F(y, eta) = gamma(y eta o x^2) / gamma(eta o x^2)."""
    return weil_index_scalar(y, ctx) / weil_index_scalar(1, ctx)


# -- quadratic spaces ---------------------------------------------------------

@dataclass(frozen=True)
class QuadSpaceF:
    """Diagonal quadratic space <a_1, ..., a_k> over F, all a_i nonzero."""

    diag: tuple[Fraction, ...] = ()

    def __post_init__(self):
        d = tuple(as_fraction(x) for x in self.diag)
        if any(not x for x in d):
            raise ValueError("QuadSpaceF entries must be nonzero")
        object.__setattr__(self, "diag", d)

    @property
    def rank(self) -> int:
        return len(self.diag)

    def discriminant(self) -> Fraction:
        out = Fraction(1)
        for a in self.diag:
            out *= a
        return out

    def hasse(self, p: int) -> Mu8:
        out = ONE
        for i, a in enumerate(self.diag):
            for b in self.diag[i + 1:]:
                out = out * hilbert_symbol(a, b, p)
        return out

    def scaled(self, c) -> QuadSpaceF:
        c = as_fraction(c)
        return QuadSpaceF(tuple(c * a for a in self.diag))

    def __add__(self, other: QuadSpaceF) -> QuadSpaceF:
        return QuadSpaceF(self.diag + other.diag)


def weil_index_quadspace(q: QuadSpaceF, ctx: LocalContext) -> Mu8:
    """gamma_F(eta o q), multiplicative over the diagonal."""
    return mu8_product(weil_index_scalar(a, ctx) for a in q.diag)


def congruence_diagonalize(G: Matrix):
    """Return (P, d) with P @ G @ P.T diagonal with entries d.

    The trailing zero entries of d span the radical.
    """
    n = G.nrows
    if not G.is_square():
        raise NotSymmetric("Gram matrix must be square")
    A = to_mpq_rows(G.rows)
    for i in range(n):
        for j in range(i + 1, n):
            if A[i][j] != A[j][i]:
                raise NotSymmetric(f"entry ({i},{j}) differs from ({j},{i})")
    zero, one = mpq(0), mpq(1)
    P = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def add_to(i, j, f):
        # row_i += f row_j, col_i += f col_j
        A[i] = [x + f * y for x, y in zip(A[i], A[j])]
        for r in A:
            r[i] = r[i] + f * r[j]
        P[i] = [x + f * y for x, y in zip(P[i], P[j])]

    def swap(i, j):
        A[i], A[j] = A[j], A[i]
        for r in A:
            r[i], r[j] = r[j], r[i]
        P[i], P[j] = P[j], P[i]

    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if A[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j]), None)
            if pair is None:
                break
            i, j = pair
            add_to(i, j, one)
            piv = i
        swap(k, piv)
        a = A[k][k]
        for i in range(k + 1, n):
            if A[i][k]:
                f = -A[i][k] / a
                A[i] = [x + f * y for x, y in zip(A[i], A[k])]
                for r in A:
                    r[i] = r[i] + f * r[k]
                P[i] = [x + f * y for x, y in zip(P[i], P[k])]
        k += 1
    return Matrix._raw(to_fraction_rows(P), QQ, n), [to_fraction(A[i][i]) for i in range(n)]


def diagonalize(G: Matrix) -> tuple[QuadSpaceF, int]:
    """Nondegenerate part of the form G and the dimension of its radical."""
    _, d = congruence_diagonalize(G)
    nz = tuple(x for x in d if x)
    return QuadSpaceF(nz), len(d) - len(nz)
