"""Bruhat decomposition relative to the Siegel parabolic.

Works for the isometry group of J = [[0, 1_N], [-1_N, 0]] under
s J s^* = J, with ^* the conjugate transpose (plain transpose over F).
Matrices act on row vectors from the right, so for s = [[a, b], [c, d]]
the block c sends Y-coordinates to X-coordinates and the parabolic
stabilizing Y = {(0, y)} is {c = 0}; for such p, "p restricted to Y" is d.
"""

from __future__ import annotations

from .exact import Matrix, SingularMatrix


class NotInParabolic(AssertionError):
    pass


def standard_form(N: int, field) -> Matrix:
    I = Matrix.identity(N, field)
    Z = Matrix.zeros(N, N, field)
    return Matrix.from_blocks([[Z, I], [-I, Z]])


def blocks(s: Matrix):
    N = s.nrows // 2
    return (s.submatrix(0, N, 0, N), s.submatrix(0, N, N, 2 * N),
            s.submatrix(N, 2 * N, 0, N), s.submatrix(N, 2 * N, N, 2 * N))


def weyl_element(N: int, j: int, field) -> Matrix:
    """e_i -> -e_i^*, e_i^* -> e_i for i < j; identity on the rest."""
    if not 0 <= j <= N:
        raise IndexError(f"Weyl index {j} outside 0..{N}")
    z, o = field.zero, field.one
    rows = [[z] * (2 * N) for _ in range(2 * N)]
    for i in range(N):
        if i < j:
            rows[i][N + i] = -o
            rows[N + i][i] = o
        else:
            rows[i][i] = o
            rows[N + i][N + i] = o
    return Matrix._raw(rows, field, 2 * N)


def isometry_inverse(s: Matrix, nu=None) -> Matrix:
    """s^-1 = J s^* J^-1 / nu for s J s^* = nu J."""
    N = s.nrows // 2
    a, b, c, d = blocks(s.H)
    # J M J^-1 for M = [[a, b], [c, d]] equals [[d, -c], [-b, a]]
    out = Matrix.from_blocks([[d, -c], [-b, a]])
    if nu is not None and nu != 1:
        out = out.scale(s.field.one / nu)
    return out


def in_parabolic(s: Matrix) -> bool:
    _, _, c, _ = blocks(s)
    return c.is_zero()


def cell_index(s: Matrix) -> int:
    _, _, c, _ = blocks(s)
    return c.rank()


def _random_invertible(n, field, rng):
    while True:
        M = Matrix([[_small(field, rng) for _ in range(n)] for _ in range(n)], field)
        if M.det():
            return M


def _small(field, rng):
    x = rng.randint(-3, 3)
    if field.delta is None:
        return field(x)
    return field(x, rng.randint(-2, 2))


def _complete_basis(K: Matrix, N: int, field, rng):
    """Rows extending the rows of K to a basis of field^N."""
    need = N - K.nrows
    if rng is None:
        piv = K.rref()[1] if K.nrows else []
        z, o = field.zero, field.one
        rows = [[o if t == i else z for t in range(N)] for i in range(N) if i not in piv]
        return Matrix._raw(rows, field, N)
    while True:
        C = Matrix([[_small(field, rng) for _ in range(N)] for _ in range(need)], field, N)
        if C.vstack(K).rank() == N:
            return C


def decompose(s: Matrix, rng=None):
    """Return (p1, j, p2) with s = p1 @ tau_j @ p2, p1 and p2 in the parabolic.

    With ``rng`` the free choices (bases of Ys cap Y and its complement) are
    randomized, producing a different but equally valid decomposition.
    """
    field = s.field
    N = s.nrows // 2
    a, b, c, d = blocks(s)
    j = c.rank()
    ker = c.left_nullspace()                      # y with y c = 0
    if rng is not None and ker.nrows:
        ker = _random_invertible(ker.nrows, field, rng) @ ker
    Ys_cap_Y = ker @ d                            # basis of (Y s) cap Y
    comp = _complete_basis(Ys_cap_Y, N, field, rng)
    d2 = comp.vstack(Ys_cap_Y)
    d2_inv = d2.inverse()
    a2 = d2_inv.H
    z = field.zero
    tau_block = [[z] * N for _ in range(N)]
    if j:
        targets = a2.submatrix(0, j, 0, N)
        ys = c.left_solve(targets)                 # ys c = rows of a2 (i < j)
        t = (ys @ d) @ d2_inv                      # Y-parts in the basis d2
        for i in range(j):
            for k in range(j):
                tau_block[i][k] = t.rows[i][k]
    tb = Matrix._raw(tau_block, field, N)
    if tb.H != tb:
        raise NotInParabolic("Bruhat correction block is not hermitian")
    b2 = tb @ d2
    p2 = Matrix.from_blocks([[a2, b2], [Matrix.zeros(N, N, field), d2]])
    tau = weyl_element(N, j, field)
    p1 = s @ isometry_inverse(p2) @ isometry_inverse(tau)
    if not in_parabolic(p1):
        raise NotInParabolic("left factor escaped the parabolic")
    return p1, j, p2


def levi_det(p: Matrix):
    """det(p restricted to Y) for p in the parabolic."""
    N = p.nrows // 2
    return p.submatrix(N, 2 * N, N, 2 * N).det()


def siegel_levi(A: Matrix) -> Matrix:
    """diag(A, (A^*)^-1)."""
    N = A.nrows
    Z = Matrix.zeros(N, N, A.field)
    return Matrix.from_blocks([[A, Z], [Z, A.H.inverse()]])


def siegel_unipotent(B: Matrix) -> Matrix:
    """[[1, B], [0, 1]]; in the group iff B is hermitian."""
    if B.H != B:
        raise ValueError("unipotent block must be hermitian")
    N = B.nrows
    I = Matrix.identity(N, B.field)
    return Matrix.from_blocks([[I, B], [Matrix.zeros(N, N, B.field), I]])


__all__ = [
    "NotInParabolic", "SingularMatrix", "blocks", "cell_index", "decompose",
    "in_parabolic", "isometry_inverse", "levi_det", "siegel_levi",
    "siegel_unipotent", "standard_form", "weyl_element",
]
