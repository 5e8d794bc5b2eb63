"""The symplectic F-space BW = V (x)_E W and the embedding of G x H into GSp(BW).

Elements of BW are m x n matrices X over E (v (x) w is the outer product of
the column v and the row w).  The symplectic form is

    <<X, X'>> = 1/2 Tr_{E/F}((v, v') conj<w, w'>) = -1/2 Tr_{E/F} tr(A X' J X^*)

and iota(g, h) sends X to g^-1 X h.  F-coordinates: BX = V (x) X (the first
r columns of X) gets the basis {v_k (x) e_i} then {delta v_k (x) e_i}, with
(k, i) lexicographic; BY = V (x) Y gets the dual basis, so the Gram matrix in
these adapted coordinates is the standard [[0, 1], [-1, 0]].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import siegel
from .exact import Matrix, QQ, ShapeMismatch, as_fraction
from .hermitian import (HermitianSpace, NotIsometry, SimilitudeElement,
                        SplitSkewHermitianSpace, ZeroScale, identity)


class DegenerateForm(AssertionError):
    pass


class NotLagrangian(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GSpElement:
    mat: Matrix
    nu: Fraction

    def __matmul__(self, other: GSpElement) -> GSpElement:
        return GSpElement(self.mat @ other.mat, self.nu * other.nu)

    def inverse(self) -> GSpElement:
        return GSpElement(siegel.isometry_inverse(self.mat, self.nu), 1 / self.nu)

    def sp_part(self) -> GSpElement:
        """g_1 = d(nu(g))^-1 g."""
        if self.nu == 1:
            return self
        N = self.mat.nrows // 2
        inv = 1 / self.nu
        rows = [list(r) for r in self.mat.rows[:N]]
        rows += [[inv * x for x in r] for r in self.mat.rows[N:]]
        return GSpElement(Matrix._raw(rows, QQ, 2 * N), Fraction(1))

    def twist(self, y) -> GSpElement:
        """s^y = d(y)^-1 s d(y)."""
        y = as_fraction(y)
        if not y:
            raise ZeroScale("twist by zero")
        if y == 1:
            return self
        N = self.mat.nrows // 2
        inv = 1 / y
        rows = []
        for i, r in enumerate(self.mat.rows):
            left, right = r[:N], r[N:]
            if i < N:
                rows.append(left + [y * x for x in right])
            else:
                rows.append([inv * x for x in left] + right)
        return GSpElement(Matrix._raw(rows, QQ, 2 * N), self.nu)

    def __eq__(self, other):
        return isinstance(other, GSpElement) and self.nu == other.nu and self.mat == other.mat

    def __hash__(self):
        return hash((self.mat, self.nu))


@dataclass(frozen=True)
class SpBruhat:
    p1: Matrix
    j: int
    p2: Matrix
    x_class: Fraction


@dataclass(frozen=True, eq=False)
class Lagrangian:
    """Maximal isotropic subspace, stored as its reduced row echelon basis."""

    span: Matrix

    def __eq__(self, other):
        return isinstance(other, Lagrangian) and self.span == other.span

    def __hash__(self):
        return hash(self.span)

    @property
    def dim(self) -> int:
        return self.span.nrows


class DoubledSpace:
    def __init__(self, V: HermitianSpace, W: SplitSkewHermitianSpace, x_order=None):
        if V.field != W.field:
            raise ShapeMismatch("V and W live over different extensions")
        self.V, self.W = V, W
        self.field = V.field
        self.m, self.r = V.m, W.r
        self.n = W.n
        self.N = self.m * self.n
        N = self.N
        mr = self.m * self.r
        xs = [(c, k, i) for c in (0, 1) for k in range(self.m) for i in range(self.r)]
        if x_order is not None:
            if sorted(x_order) != list(range(N)):
                raise ValueError("x_order must permute range(mn)")
            xs = [xs[t] for t in x_order]
        ys = [(c, k, self.r + i) for (c, k, i) in xs]
        self._raw_index = xs + ys
        self._pos = {key: t for t, key in enumerate(self._raw_index)}
        assert len(xs) == 2 * mr == N

        raw_basis = [self._unit(key) for key in self._raw_index]
        gram_raw = Matrix([[self.trace_form(X, Y) for Y in raw_basis] for X in raw_basis], QQ)
        if gram_raw.T != -gram_raw:
            raise DegenerateForm("trace form is not alternating")
        if gram_raw.submatrix(0, N, 0, N).is_zero() is False or \
                gram_raw.submatrix(N, 2 * N, N, 2 * N).is_zero() is False:
            raise DegenerateForm("BX or BY is not isotropic")
        pairing = gram_raw.submatrix(0, N, N, 2 * N)
        try:
            Q = pairing.inverse()
        except ArithmeticError as exc:
            raise DegenerateForm("trace form is degenerate") from exc
        I = Matrix.identity(N, QQ)
        Z = Matrix.zeros(N, N, QQ)
        # rows of T are the adapted basis vectors in raw coordinates
        self._T = Matrix.from_blocks([[I, Z], [Z, Q.T]])
        self._T_inv = Matrix.from_blocks([[I, Z], [Z, pairing.T]])
        self.gram_raw = gram_raw
        self.gram = siegel.standard_form(N, QQ)
        if self._T @ gram_raw @ self._T.T != self.gram:
            raise DegenerateForm("dual adjustment failed")
        eye = Matrix.identity(2 * N, QQ)
        self._basis = [self.from_coords(eye.row(t)) for t in range(2 * N)]
        self.Y = Lagrangian(Matrix.identity(2 * N, QQ).submatrix(N, 2 * N, 0, 2 * N))
        self.X = Lagrangian(Matrix.identity(2 * N, QQ).submatrix(0, N, 0, 2 * N))

    # -- coordinates -------------------------------------------------------

    def _unit(self, key) -> Matrix:
        c, k, col = key
        rows = Matrix.zeros(self.m, self.n, self.field).tolist()
        rows[k][col] = self.field.gen if c else self.field.one
        return Matrix(rows, self.field)

    def trace_form(self, X: Matrix, Xp: Matrix) -> Fraction:
        M = self.V.gram @ Xp @ self.W.gram @ X.H
        t = sum((M[i, i] for i in range(self.m)), self.field.zero)
        return -t.a   # -1/2 Tr_{E/F}(t) = -Re(t)

    def raw_coords(self, X: Matrix) -> Matrix:
        out = []
        for c, k, col in self._raw_index:
            x = X[k, col]
            out.append(x.b if c else x.a)
        return Matrix._raw([out], QQ, 2 * self.N)

    def coords(self, X: Matrix) -> Matrix:
        """Adapted F-coordinates (a row vector) of the E-matrix X."""
        return self.raw_coords(X) @ self._T_inv

    def from_coords(self, v: Matrix) -> Matrix:
        raw = v @ self._T
        rows = Matrix.zeros(self.m, self.n, self.field).tolist()
        for t, (c, k, col) in enumerate(self._raw_index):
            x = raw[0, t]
            if x:
                rows[k][col] = rows[k][col] + (self.field(0, x) if c else self.field(x))
        return Matrix(rows, self.field)

    def form(self, u: Matrix, v: Matrix) -> Fraction:
        """<<u, v>> for adapted row vectors."""
        return (u @ self.gram @ v.T)[0, 0]

    # -- group elements ------------------------------------------------------

    def iota(self, g: SimilitudeElement, h: SimilitudeElement) -> GSpElement:
        """(v (x) w) iota(g, h) = g^-1 v (x) w h."""
        if g.mat.shape != (self.m, self.m) or h.mat.shape != (self.n, self.n):
            raise ShapeMismatch("iota: wrong sizes")
        ginv = g.mat.inverse()
        rows = []
        for B in self._basis:
            rows.extend(self.raw_coords(ginv @ B @ h.mat).rows)
        mat = Matrix._raw(rows, QQ, 2 * self.N) @ self._T_inv
        nu = h.nu / g.nu
        return GSpElement(mat, nu)

    def iota_V(self, h: SimilitudeElement) -> GSpElement:
        return self.iota(identity(self.V), h)

    def iota_W(self, g: SimilitudeElement) -> GSpElement:
        return self.iota(g, identity(self.W))

    def d_big(self, y) -> GSpElement:
        """d(y) = diag(1_mn, y 1_mn)."""
        y = as_fraction(y)
        if not y:
            raise ZeroScale("d(0) is not invertible")
        N = self.N
        return GSpElement(Matrix.diag([1] * N + [y] * N, QQ), y)

    def tau_big(self, j: int) -> GSpElement:
        return GSpElement(siegel.weyl_element(self.N, j, QQ), Fraction(1))

    def gsp_factor(self, M: Matrix) -> Fraction:
        img = M @ self.gram @ M.T
        nu = img[0, self.N]
        if not nu or img != self.gram.scale(nu):
            raise NotIsometry("not a symplectic similitude")
        return nu

    def identity(self) -> GSpElement:
        return GSpElement(Matrix.identity(2 * self.N, QQ), Fraction(1))

    def bruhat_sp(self, s: GSpElement, rng=None) -> SpBruhat:
        """s = p1 tau_j p2 in Sp(BW); x(s) = det(p1 p2 |_BY)."""
        if s.nu != 1:
            raise NotIsometry(f"nu(s) = {s.nu}, expected 1")
        p1, j, p2 = siegel.decompose(s.mat, rng)
        return SpBruhat(p1, j, p2, siegel.levi_det(p1) * siegel.levi_det(p2))

    # -- Lagrangians ---------------------------------------------------------

    def lagrangian(self, rows: Matrix) -> Lagrangian:
        span = rows.row_space()
        if span.nrows != self.N:
            raise NotLagrangian(f"dimension {span.nrows}, expected {self.N}")
        if not (span @ self.gram @ span.T).is_zero():
            raise NotLagrangian("subspace is not isotropic")
        return Lagrangian(span)

    def lagrangian_image(self, L: Lagrangian, s: GSpElement) -> Lagrangian:
        return self.lagrangian(L.span @ s.mat)

    def Y_image(self, s: GSpElement) -> Lagrangian:
        """BY s, read off the BY rows of s."""
        N = self.N
        return self.lagrangian(s.mat.submatrix(N, 2 * N, 0, 2 * N))


def build_doubled(V: HermitianSpace, W: SplitSkewHermitianSpace, x_order=None) -> DoubledSpace:
    return DoubledSpace(V, W, x_order)
