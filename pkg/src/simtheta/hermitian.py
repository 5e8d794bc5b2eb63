"""Hermitian and split skew-hermitian spaces over E and their similitude groups.

Conventions (fixed once, used everywhere):

* W = E^{2r} as row vectors, <x, y> = x J y^*, J = [[0, 1_r], [-1_r, 0]].
  H = GU(W) acts on the right: h J h^* = nu(h) J.  The basis is
  e_1..e_r (spanning X) followed by e_1^*..e_r^* (spanning Y), so P_Y is the
  block upper triangular subgroup and x(h) is read off the lower-right block.
* V = E^m as column vectors, (v, w) = v^* A w with A hermitian.
  G = GU(V) acts on the left: g^* A g = nu(g) A.  This keeps the form on
  V (x)_E W well defined and makes (g, h) -> [X -> g^-1 X h] a homomorphism.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import siegel
from .exact import Matrix, QuadExtField, ShapeMismatch, as_fraction
from .local import LocalContext, Mu8, epsilon_EF


class NotSimilitude(ValueError):
    pass


class NotIsometry(ValueError):
    pass


class ZeroScale(ValueError):
    pass


class NotFound(LookupError):
    """A bounded search ran out; says nothing about existence."""


class RetryExhausted(RuntimeError):
    pass


class HermitianSpace:
    """(V, A) with A = A^* nondegenerate; G = GU(V) acts on the left."""

    kind = "hermitian"

    def __init__(self, gram: Matrix):
        if not gram.is_square():
            raise ShapeMismatch("Gram matrix must be square")
        if gram.H != gram:
            raise ValueError("Gram matrix is not hermitian")
        det = gram.det()
        if not det:
            raise ValueError("degenerate hermitian form")
        if det.b:
            raise ValueError("hermitian determinant must lie in F")
        self.gram = gram
        self.field = gram.field

    @classmethod
    def diagonal(cls, entries, field: QuadExtField) -> HermitianSpace:
        return cls(Matrix.diag([as_fraction(a) for a in entries], field))

    @property
    def m(self) -> int:
        return self.gram.nrows

    @property
    def dim(self) -> int:
        return self.m

    def det(self) -> Fraction:
        return self.gram.det().a

    def diagonal_entries(self):
        g = self.gram
        if any(g[i, j] for i in range(self.m) for j in range(self.m) if i != j):
            return None
        return [g[i, i].a for i in range(self.m)]

    def pairing(self, v: Matrix, w: Matrix):
        """(v, w) = v^* A w for column vectors."""
        return (v.H @ self.gram @ w)[0, 0]

    def __repr__(self):
        return f"HermitianSpace(m={self.m}, gram={self.gram})"


class SplitSkewHermitianSpace:
    """W = X + Y of E-dimension n = 2r with the standard split Gram."""

    kind = "skew"

    def __init__(self, r: int, field: QuadExtField):
        if r < 1:
            raise ValueError("r must be positive")
        self.r = r
        self.field = field
        self.gram = siegel.standard_form(r, field)

    @property
    def n(self) -> int:
        return 2 * self.r

    @property
    def dim(self) -> int:
        return self.n

    def pairing(self, x: Matrix, y: Matrix):
        """<x, y> = x J y^* for row vectors."""
        return (x @ self.gram @ y.H)[0, 0]

    def __repr__(self):
        return f"SplitSkewHermitianSpace(r={self.r})"


@dataclass(frozen=True, eq=False)
class SimilitudeElement:
    mat: Matrix
    nu: Fraction

    def __matmul__(self, other: SimilitudeElement) -> SimilitudeElement:
        return SimilitudeElement(self.mat @ other.mat, self.nu * other.nu)

    def inverse(self) -> SimilitudeElement:
        return SimilitudeElement(self.mat.inverse(), 1 / self.nu)

    def __eq__(self, other):
        return isinstance(other, SimilitudeElement) and self.nu == other.nu and self.mat == other.mat

    def __hash__(self):
        return hash((self.mat, self.nu))


def _form_image(M: Matrix, space) -> Matrix:
    if space.kind == "skew":
        return M @ space.gram @ M.H
    return M.H @ space.gram @ M


def similitude_factor(M: Matrix, space) -> Fraction:
    """The unique nu with M preserving the form of ``space`` up to nu."""
    if M.shape != space.gram.shape:
        raise ShapeMismatch(f"{M.shape} vs space of dimension {space.dim}")
    img = _form_image(M, space)
    G = space.gram
    i, j = next((i, j) for i in range(G.nrows) for j in range(G.ncols) if G[i, j])
    nu = img[i, j] / G[i, j]
    if nu.b or not nu.a or G.scale(nu) != img:
        raise NotSimilitude("matrix does not preserve the form up to a scalar in F^x")
    return nu.a


def element(M: Matrix, space) -> SimilitudeElement:
    return SimilitudeElement(M, similitude_factor(M, space))


def identity(space) -> SimilitudeElement:
    return SimilitudeElement(Matrix.identity(space.dim, space.field), Fraction(1))


def tau(space: SplitSkewHermitianSpace, j: int) -> SimilitudeElement:
    """Weyl element: e_i -> -e_i^*, e_i^* -> e_i for i <= j."""
    return SimilitudeElement(siegel.weyl_element(space.r, j, space.field), Fraction(1))


def d_scale(space: SplitSkewHermitianSpace, y) -> SimilitudeElement:
    """d(y) = diag(1_r, y 1_r), a similitude with factor y."""
    y = as_fraction(y)
    if not y:
        raise ZeroScale("d(0) is not invertible")
    r = space.r
    return SimilitudeElement(Matrix.diag([1] * r + [y] * r, space.field), y)


@dataclass(frozen=True)
class BruhatData:
    p1: SimilitudeElement
    j: int
    p2: SimilitudeElement
    x_class: object  # nonzero E-scalar det((p1 p2)|_Y)

    def reconstruct(self, space) -> Matrix:
        return self.p1.mat @ tau(space, self.j).mat @ self.p2.mat


def bruhat_decompose(h: SimilitudeElement, space: SplitSkewHermitianSpace, rng=None) -> BruhatData:
    """h = p1 tau_j p2 with p1, p2 in P_Y; x(h) = det(p1 p2 |_Y)."""
    if h.nu != 1:
        raise NotIsometry(f"nu(h) = {h.nu}, expected 1")
    p1, j, p2 = siegel.decompose(h.mat, rng)
    x = siegel.levi_det(p1) * siegel.levi_det(p2)
    one = Fraction(1)
    return BruhatData(SimilitudeElement(p1, one), j, SimilitudeElement(p2, one), x)


def conj_by_d(h: SimilitudeElement, y, space: SplitSkewHermitianSpace) -> SimilitudeElement:
    """h^y = d(y)^-1 h d(y)."""
    d = d_scale(space, y)
    return d.inverse() @ h @ d


def project_isometry(h: SimilitudeElement, space: SplitSkewHermitianSpace) -> SimilitudeElement:
    """h_1 = d(nu(h))^-1 h."""
    return d_scale(space, h.nu).inverse() @ h


# -- random generation -----------------------------------------------------

def _small_rational(rng, bound=3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def _small_E(field, rng, bound=3):
    return field(_small_rational(rng, bound), _small_rational(rng, bound))


def _random_levi_block(field, r, rng):
    A = Matrix.identity(r, field).tolist()
    if r > 1 and rng.random() < 0.5:
        i, k = rng.sample(range(r), 2)
        A[i][k] = _small_E(field, rng)
    else:
        i = rng.randrange(r)
        z = field.zero
        while not z:
            z = _small_E(field, rng)
        A[i][i] = z
    return Matrix(A, field)


def _random_hermitian(field, r, rng):
    B = Matrix.zeros(r, r, field).tolist()
    i, k = rng.randrange(r), rng.randrange(r)
    if i == k:
        B[i][i] = field(_small_rational(rng))
    else:
        x = _small_E(field, rng)
        B[i][k] = x
        B[k][i] = x.conj()
    return Matrix(B, field)


def random_unitary(space, rng, word_len: int = 6) -> SimilitudeElement:
    """A random isometry (nu = 1) of ``space``.

    Split W: a word in Levi elements diag(A, A^-*), unipotents [[1, b], [0, 1]]
    with b hermitian, and Weyl elements.  Hermitian V: a product of Cayley
    transforms (1 - Z)(1 + Z)^-1 with Z^* A + A Z = 0.
    """
    field = space.field
    out = Matrix.identity(space.dim, field)
    if space.kind == "skew":
        r = space.r
        for _ in range(word_len):
            kind = rng.randrange(3)
            if kind == 0:
                letter = siegel.siegel_levi(_random_levi_block(field, r, rng))
            elif kind == 1:
                letter = siegel.siegel_unipotent(_random_hermitian(field, r, rng))
            else:
                letter = siegel.weyl_element(r, rng.randint(0, r), field)
            out = out @ letter
    else:
        for _ in range(word_len):
            out = out @ cayley(space, _random_skew_hermitian(field, space.m, rng), retries_rng=rng)
    if similitude_factor(out, space) != 1:
        raise NotIsometry("generator produced a non-isometry")
    return SimilitudeElement(out, Fraction(1))


def _random_skew_hermitian(field, m, rng):
    K = Matrix.zeros(m, m, field).tolist()
    i, k = rng.randrange(m), rng.randrange(m)
    if i == k:
        K[i][i] = field(0, _small_rational(rng))
    else:
        x = _small_E(field, rng)
        K[i][k] = x
        K[k][i] = -x.conj()
    return Matrix(K, field)


def cayley(space: HermitianSpace, K: Matrix, retries_rng=None, retries: int = 50) -> Matrix:
    """Cayley transform of Z = A^-1 K for skew-hermitian K.

    If 1 + Z is singular and ``retries_rng`` is given, K is halved until it
    is not (this only shrinks the Lie algebra element).
    """
    field = space.field
    I = Matrix.identity(space.m, field)
    Ainv = space.gram.inverse()
    for _ in range(retries):
        Z = Ainv @ K
        try:
            inv = (I + Z).inverse()
        except ArithmeticError:
            if retries_rng is None:
                raise
            K = K.scale(Fraction(1, 2))
            continue
        return (I - Z) @ inv
    raise RetryExhausted("1 + Z stayed singular")


def random_h_similitude(space: SplitSkewHermitianSpace, rng, y, word_len: int = 6) -> SimilitudeElement:
    return d_scale(space, y) @ random_unitary(space, rng, word_len)


# -- similitude factors on V ---------------------------------------------------

def _rational_sqrt(t: Fraction):
    if t < 0:
        return None
    n, d = t.numerator, t.denominator
    a, b = math.isqrt(n), math.isqrt(d)
    if a * a == n and b * b == d:
        return Fraction(a, b)
    return None


def _rationals_by_height(bound: int):
    seen = set()
    for h in range(0, bound + 1):
        for den in range(1, bound + 1):
            for num in (h, -h):
                q = Fraction(num, den)
                if q not in seen and max(abs(num), den) <= bound:
                    seen.add(q)
                    yield q


def norm_preimage(y, field: QuadExtField, search_bound: int = 8):
    """Some z in E with N(z) = y, found by bounded search, or None."""
    y = as_fraction(y)
    for b in _rationals_by_height(search_bound):
        a = _rational_sqrt(y + field.delta * b * b)
        if a is not None:
            return field(a, b)
    return None


def similitude_with_factor(space, y, search_bound: int = 8) -> SimilitudeElement:
    """An element of GU(space) with similitude factor y.

    Split W: d(y).  Hermitian V: a scalar z when y = N(z); for even m and a
    diagonal Gram, a block solution on consecutive pairs of basis vectors.
    """
    y = as_fraction(y)
    if not y:
        raise ZeroScale("similitude factor must be nonzero")
    if space.kind == "skew":
        return d_scale(space, y)
    field = space.field
    m = space.m
    z = norm_preimage(y, field, search_bound)
    if z is not None:
        return element(Matrix.diag([z] * m, field), space)
    diag = space.diagonal_entries()
    if m % 2 or diag is None:
        raise NotFound(f"no similitude with factor {y} within bound {search_bound}")
    M = Matrix.zeros(m, m, field).tolist()
    for k in range(0, m, 2):
        a1, a2 = diag[k], diag[k + 1]
        u, v = _solve_pair(a1, a2, y, field, search_bound)
        # columns (u, v) and (conj(v) a2/a1, -conj(u)) are orthogonal with
        # lengths y a1 and y a2
        M[k][k], M[k + 1][k] = u, v
        M[k][k + 1], M[k + 1][k + 1] = v.conj() * (a2 / a1), -u.conj()
    g = element(Matrix(M, field), space)
    if g.nu != y:
        raise NotSimilitude("block construction failed")
    return g


def _solve_pair(a1, a2, y, field, bound):
    # N(u) a1 + N(v) a2 = y a1
    for v0, v1 in itertools.product(_rationals_by_height(bound), repeat=2):
        if not v0 and not v1:
            continue
        v = field(v0, v1)
        t = y - (a2 / a1) * v.norm()
        if not t:
            continue
        u = norm_preimage(t, field, bound)
        if u is not None:
            return u, v
    raise NotFound(f"no block similitude with factor {y} within bound {bound}")


def random_g_similitude(space: HermitianSpace, rng, witnesses, word_len: int = 6) -> SimilitudeElement:
    """scalar * (optional non-norm witness) * random isometry.

    ``witnesses`` is a list of fixed elements of G whose factors cover
    F^x / N(E^x); an empty list restricts to norm factors.
    """
    field = space.field
    z = field.zero
    while not z:
        z = _small_E(field, rng)
    g = SimilitudeElement(Matrix.diag([z] * space.m, field), z.norm())
    if witnesses and rng.random() < 0.5:
        g = g @ rng.choice(witnesses)
    return g @ random_unitary(space, rng, word_len)


# -- classifiers -----------------------------------------------------------------

def epsilon_space(V: HermitianSpace, ctx: LocalContext) -> Mu8:
    """epsilon_{E/F}((-1)^{m(m-1)/2} det V)."""
    m = V.m
    return epsilon_EF((-1) ** (m * (m - 1) // 2) * V.det(), ctx)


def hermitian_space_with_sign(m: int, sign: int, ctx: LocalContext, field: QuadExtField) -> HermitianSpace:
    """A diagonal <1, ..., 1, a> with epsilon_space equal to ``sign``."""
    target = Mu8.from_sign(sign)
    for a in _rationals_by_height(4 * ctx.p):
        if not a:
            continue
        for cand in (a, a * ctx.p):
            V = HermitianSpace.diagonal([1] * (m - 1) + [cand], field)
            if epsilon_space(V, ctx) == target:
                return V
    raise NotFound("no representative found")


def nu_in_image_of_G(y, V: HermitianSpace, ctx: LocalContext) -> bool:
    """Whether y lies in nu(G): all of F^x for even m, the norms for odd m."""
    if V.m % 2 == 0:
        return True
    return epsilon_EF(y, ctx) == 1


def in_H_plus(h: SimilitudeElement, V: HermitianSpace, ctx: LocalContext) -> bool:
    return nu_in_image_of_G(h.nu, V, ctx)


def in_R(g: SimilitudeElement, h: SimilitudeElement) -> bool:
    """(g, h) lies in R = {nu(g) = nu(h)}."""
    return g.nu == h.nu
