"""Leray invariants, the Rao cocycle on Sp(BW), the similitude cocycle C on
GSp(BW), the character chi, the splitting beta_{V,chi} over U(W), and the
commutator of lifts of iota_W(g) and iota_V(h).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .doubling import DoubledSpace, GSpElement, Lagrangian, NotLagrangian
from .exact import Matrix, QQ, QuadExt, as_fraction
from .hermitian import (HermitianSpace, NotIsometry, SimilitudeElement,
                        SplitSkewHermitianSpace, ZeroScale, bruhat_decompose)
from .local import (LocalContext, Mu8, QuadSpaceF, diagonalize, gamma_eta,
                    hilbert_symbol, valuation, weil_index_quadspace)


class ChiUnavailable(ValueError):
    pass


class LerayConvention(NamedTuple):
    """Overall sign and scale applied to the raw Leray form."""

    sign: int
    scale: int


LERAY_CANDIDATES = tuple(LerayConvention(s, c) for s in (1, -1) for c in (1, 2))

# Selected by calibrate_leray(); q(v) = <<v3, v1>> at unit scale.
LERAY_CONVENTION = LerayConvention(sign=-1, scale=1)


# -- Leray invariant ---------------------------------------------------------

def _meet_is_zero(A: Matrix, B: Matrix) -> bool:
    return A.vstack(B).rank() == A.nrows + B.nrows


def in_general_position(L1: Lagrangian, L2: Lagrangian, L3: Lagrangian) -> bool:
    return (_meet_is_zero(L1.span, L3.span) and _meet_is_zero(L1.span, L2.span)
            and _meet_is_zero(L2.span, L3.span))


def _symmetrize(M: Matrix) -> Matrix:
    half = Fraction(1, 2)
    return Matrix._raw([[half * (x + y) for x, y in zip(r, c)] for r, c in zip(M.rows, M.T.rows)],
                       QQ, M.ncols)


def leray_direct(L1, L2, L3, D: DoubledSpace) -> QuadSpaceF:
    """q(v) = <<v1, v3>> on L2, where v = v1 + v3 with v1 in L1, v3 in L3.

    Needs L1 and L3 transverse.
    """
    N = D.N
    basis13 = L1.span.vstack(L3.span)
    coeffs = basis13.left_solve(L2.span)           # L2 rows in the basis (L1; L3)
    v1 = coeffs.submatrix(0, N, 0, N) @ L1.span
    v3 = coeffs.submatrix(0, N, N, 2 * N) @ L3.span
    q, _ = diagonalize(_symmetrize(v1 @ D.gram @ v3.T))
    return q


def leray_kashiwara(L1, L2, L3, D: DoubledSpace) -> QuadSpaceF:
    """Nondegenerate part of Q(x1, x2, x3) = <<x1,x2>> + <<x2,x3>> + <<x3,x1>>
    on L1 + L2 + L3 (external direct sum)."""
    N = D.N
    Om = D.gram
    M12 = L1.span @ Om @ L2.span.T
    M23 = L2.span @ Om @ L3.span.T
    M31 = L3.span @ Om @ L1.span.T
    Z = Matrix.zeros(N, N, QQ)
    M = Matrix.from_blocks([[Z, M12, Z], [Z, Z, M23], [M31, Z, Z]])
    q, _ = diagonalize(_symmetrize(M))
    return q


def leray_invariant(L1: Lagrangian, L2: Lagrangian, L3: Lagrangian, D: DoubledSpace,
                    convention: LerayConvention = LERAY_CONVENTION, method: str = "auto") -> QuadSpaceF:
    """Leray invariant of a Lagrangian triple, as a diagonal quadratic space.

    ``method``: "direct" (general position only), "kashiwara", or "auto"
    (direct when possible).  The raw form is scaled by sign * scale.
    """
    for L in (L1, L2, L3):
        if L.dim != D.N:
            raise NotLagrangian("triple members must be Lagrangians of BW")
    if L1 == L3:
        return QuadSpaceF(())
    if method == "direct" or (method == "auto" and in_general_position(L1, L2, L3)):
        q = leray_direct(L1, L2, L3, D)
    elif method in ("kashiwara", "auto"):
        q = leray_kashiwara(L1, L2, L3, D)
    else:
        raise ValueError(f"unknown method {method!r}")
    return q.scaled(convention.sign * convention.scale)


def rao_cocycle(s1: GSpElement, s2: GSpElement, D: DoubledSpace, ctx: LocalContext,
                convention: LerayConvention = LERAY_CONVENTION, method: str = "auto") -> Mu8:
    """c_Y(s1, s2) = gamma_F(eta o L(Y, Y s2^-1, Y s1))."""
    if s1.nu != 1 or s2.nu != 1:
        raise NotIsometry("Rao cocycle is defined on Sp")
    L2 = D.Y_image(s2.inverse())
    L3 = D.Y_image(s1)
    if L2 == D.Y or L3 == D.Y:
        return Mu8(0)
    q = leray_invariant(D.Y, L2, L3, D, convention, method)
    return weil_index_quadspace(q, ctx)


# -- mu and C -----------------------------------------------------------------

def mu(y, s: GSpElement, D: DoubledSpace, ctx: LocalContext) -> Mu8:
    """mu(y, s) = (x(s), y)_F gamma_F(y, eta)^j(s)."""
    y = as_fraction(y)
    if not y:
        raise ZeroScale("mu needs y != 0")
    if y == 1:
        return Mu8(0)
    b = D.bruhat_sp(s)
    return hilbert_symbol(b.x_class, y, ctx.p) * gamma_eta(y, ctx) ** b.j


def big_cocycle_C(g: GSpElement, gp: GSpElement, D: DoubledSpace, ctx: LocalContext,
                  convention: LerayConvention = LERAY_CONVENTION) -> Mu8:
    """C(g, g') = c_Y(g_1^{nu(g')}, g'_1) mu(nu(g'), g_1)."""
    g1 = g.sp_part()
    gp1 = gp.sp_part()
    return rao_cocycle(g1.twist(gp.nu), gp1, D, ctx, convention) * mu(gp.nu, g1, D, ctx)


# -- chi, RV and beta -----------------------------------------------------------

@dataclass(frozen=True)
class CharacterChi:
    """A character of E^x restricting to epsilon_{E/F}^m on F^x.

    m even: trivial.  m odd with E/F unramified: (-1)^{v_E(x)}, where
    v_E(x) = v_p(N(x)) / 2.
    """

    m: int
    ctx: LocalContext

    def __post_init__(self):
        if self.m % 2 and not self.ctx.unramified:
            raise ChiUnavailable(
                "odd m needs chi restricting to epsilon_{E/F}; only the unramified "
                f"case is implemented (Delta={self.ctx.delta} is ramified at {self.ctx.p})")

    @property
    def mode(self) -> str:
        return "trivial" if self.m % 2 == 0 else "unramified-quadratic"

    def __call__(self, x) -> Mu8:
        if isinstance(x, QuadExt):
            n = x.norm()
        else:
            n = as_fraction(x) ** 2
        if not n:
            raise ZeroScale("chi(0)")
        if self.m % 2 == 0:
            return Mu8(0)
        v = valuation(n, self.ctx.p)
        assert v % 2 == 0, "norm valuation is even in the unramified case"
        return Mu8(4 * (v // 2))


@dataclass(frozen=True)
class RVSpace:
    quad: QuadSpaceF


def rv_space(V: HermitianSpace, ctx: LocalContext | None = None) -> RVSpace:
    """V over F with the form 1/2 Tr_{E/F}(v, w), diagonalized."""
    m = V.m
    field = V.field
    basis = []
    for k in range(m):
        for c in (field.one, field.gen):
            col = Matrix.zeros(m, 1, field).tolist()
            col[k][0] = c
            basis.append(Matrix(col, field))
    G = Matrix([[V.pairing(u, w).a for w in basis] for u in basis], QQ)
    q, rad = diagonalize(G)
    assert rad == 0 and q.rank == 2 * m
    return RVSpace(q)


def beta_V_chi(h: SimilitudeElement, V: HermitianSpace, chi: CharacterChi,
               W: SplitSkewHermitianSpace, ctx: LocalContext, rv: RVSpace | None = None,
               rng=None) -> Mu8:
    """beta_{V,chi}(h) = chi(x(h)) gamma_F(eta o RV)^{-j(h)} for h in U(W)."""
    if h.nu != 1:
        raise NotIsometry("beta is defined on U(W)")
    b = bruhat_decompose(h, W, rng)
    rv = rv or rv_space(V, ctx)
    return chi(b.x_class) * weil_index_quadspace(rv.quad, ctx) ** (-b.j)


def commutator_value(g: SimilitudeElement, h: SimilitudeElement, D: DoubledSpace,
                     ctx: LocalContext, central=(Mu8(0), Mu8(0))) -> Mu8:
    """[g~, h~] for lifts g~ = (iota_W(g), z), h~ = (iota_V(h), z').

    Computed as the quotient of the two products g~h~ and h~g~, which lie
    over the same matrix because iota_W(g) and iota_V(h) commute.
    """
    a = D.iota_W(g)
    b = D.iota_V(h)
    z, zp = central
    ab = big_cocycle_C(a, b, D, ctx) * z * zp
    ba = big_cocycle_C(b, a, D, ctx) * zp * z
    return ab / ba


# -- calibration --------------------------------------------------------------

def relation3_holds(h, hp, V, W, D, ctx, chi, rv, convention) -> bool:
    lhs = rao_cocycle(D.iota_V(h), D.iota_V(hp), D, ctx, convention)
    rhs = (beta_V_chi(h, V, chi, W, ctx, rv).inverse()
           * beta_V_chi(hp, V, chi, W, ctx, rv).inverse()
           * beta_V_chi(h @ hp, V, chi, W, ctx, rv))
    return lhs == rhs


def _random_sp_word(N: int, rng, length: int = 4) -> GSpElement:
    from . import siegel

    M = Matrix.identity(2 * N, QQ)
    for _ in range(length):
        k = rng.randrange(3)
        if k == 0:
            M = M @ siegel.siegel_levi(siegel._random_invertible(N, QQ, rng))
        elif k == 1:
            B = Matrix([[Fraction(rng.randint(-3, 3)) for _ in range(N)] for _ in range(N)], QQ)
            M = M @ siegel.siegel_unipotent(B + B.T)
        else:
            M = M @ siegel.weyl_element(N, rng.randint(0, N), QQ)
    return GSpElement(M, Fraction(1))


def random_gsp(D: DoubledSpace, rng, length: int = 4) -> GSpElement:
    """d(y) s for a random word s in Sp(BW) and a small y (y = 1 with prob. 0.3)."""
    s = _random_sp_word(D.N, rng, length)
    if rng.random() < 0.3:
        return s
    p = rng.choice((3, 5, 7))
    y = Fraction(rng.choice((1, -1)) * rng.choice((1, 2, 3, 5, 7, p, 2 * p)), rng.choice((1, 2, p)))
    return D.d_big(y) @ s


def _calibration_setup(p: int, delta):
    from .exact import QuadExtField

    ctx = LocalContext(p, Fraction(delta))
    E = QuadExtField(ctx.delta)
    V = HermitianSpace.diagonal([1], E)
    W = SplitSkewHermitianSpace(1, E)
    return ctx, V, W, DoubledSpace(V, W)


def calibrate_leray(pairs: int = 50, triples: int = 100, seed: int = 0):
    """Select the Leray convention.

    Stage 1 keeps the candidates under which relation (3) holds on the
    battery p = 3, Delta = -1, m = 1, r = 1.  On that battery every Leray
    form is a hermitian trace form, which all four candidates rate alike, so
    stage 2 keeps those under which C satisfies the 2-cocycle identity on
    generic GSp triples at p = 3, 5, 7.  Returns (stage1, stage2).
    """
    import random

    from .hermitian import random_unitary

    ctx, V, W, D = _calibration_setup(3, -1)
    chi = CharacterChi(1, ctx)
    rv = rv_space(V, ctx)
    rng = random.Random(seed)
    samples = [(random_unitary(W, rng), random_unitary(W, rng)) for _ in range(pairs)]
    stage1 = [conv for conv in LERAY_CANDIDATES
              if all(relation3_holds(h, hp, V, W, D, ctx, chi, rv, conv) for h, hp in samples)]

    stage2 = list(stage1)
    for p, delta in ((3, -1), (5, 2), (7, 3)):
        ctx, V, W, D = _calibration_setup(p, delta)
        rng = random.Random(seed + p)
        trips = [(random_gsp(D, rng), random_gsp(D, rng), random_gsp(D, rng)) for _ in range(triples)]
        survivors = []
        for conv in stage2:
            def C(a, b):
                return big_cocycle_C(a, b, D, ctx, conv)
            if all(C(a, b) * C(a @ b, c) == C(a, b @ c) * C(b, c) for a, b, c in trips):
                survivors.append(conv)
        stage2 = survivors
    return stage1, stage2
