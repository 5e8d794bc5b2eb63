from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from simtheta.exact import (Matrix, QQ, QuadExt, QuadExtField, ShapeMismatch, SingularMatrix, conj,
                            norm_EF, restrict_scalars, trace_EF)

E2 = QuadExtField(2)

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
deltas = st.sampled_from([Fraction(2), Fraction(-1), Fraction(3), Fraction(5), Fraction(-3, 7)])


@st.composite
def scalars(draw, delta=None):
    d = delta if delta is not None else draw(deltas)
    return QuadExt(draw(small), draw(small), d)


@st.composite
def same_field(draw, k):
    d = draw(deltas)
    return [QuadExt(draw(small), draw(small), d) for _ in range(k)]


def test_conj_examples():
    assert conj(E2(1, 0)) == E2(1, 0)
    assert conj(E2(0, 1)) == E2(0, -1)
    assert conj(E2(2, 3)) == E2(2, -3)
    assert conj(Fraction(5, 3)) == Fraction(5, 3)


def test_norm_examples():
    assert norm_EF(E2(1, 0)) == 1
    assert norm_EF(E2(0, 1)) == -2
    assert norm_EF(E2(3, 1)) == 7


def test_trace():
    assert trace_EF(E2(3, 5)) == 6
    assert E2.gen * E2.gen == E2(2)


@settings(max_examples=300)
@given(same_field(3))
def test_field_axioms(xs):
    x, y, z = xs
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert conj(conj(x)) == x
    if x:
        assert x * x.inverse() == QuadExt(1, 0, x.delta)
        assert (y / x) * x == y


@settings(max_examples=1000)
@given(same_field(2))
def test_norm_multiplicative(xs):
    x, y = xs
    assert norm_EF(x * y) == norm_EF(x) * norm_EF(y)
    assert x * conj(x) == QuadExt(norm_EF(x), 0, x.delta)


def test_linear_algebra_examples():
    assert Matrix.identity(3, E2).det() == E2(1)
    assert Matrix.zeros(2, 4).rank() == 0
    assert Matrix.diag([E2.gen, E2.gen], E2).det() == E2(2)


def test_singular_and_shape_errors():
    with pytest.raises(SingularMatrix):
        Matrix([[1, 2], [2, 4]]).inverse()
    with pytest.raises(ShapeMismatch):
        Matrix([[1, 2]]) @ Matrix([[1, 2]])
    with pytest.raises(ShapeMismatch):
        Matrix([[1, 2]]) + Matrix([[1], [2]])


def test_kernels_and_solve():
    A = Matrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    K = A.nullspace()
    assert K.nrows == 1 and (A @ K.T).is_zero()   # basis vectors as rows
    L = A.left_nullspace()
    assert L.nrows == 1 and (L @ A).is_zero()
    B = Matrix([[2, 1], [1, 3]])
    b = Matrix([[1], [2]])
    assert B @ B.solve(b) == b
    rows = Matrix([[1, 4], [0, 5]])
    assert B.left_solve(rows) @ B == rows


@st.composite
def square_matrices(draw, n=3):
    d = draw(deltas)
    F = QuadExtField(d)
    return Matrix([[F(draw(small), draw(small)) for _ in range(n)] for _ in range(n)], F)


@settings(max_examples=60, deadline=None)
@given(square_matrices())
def test_inverse_exact(M):
    if not M.det():
        with pytest.raises(SingularMatrix):
            M.inverse()
        return
    assert M @ M.inverse() == Matrix.identity(3, M.field)
    assert M.inverse() @ M == Matrix.identity(3, M.field)


@settings(max_examples=60, deadline=None)
@given(square_matrices(), square_matrices())
def test_det_multiplicative_over_Q(A, B):
    A = A.map(lambda x: x.a, QQ)
    B = B.map(lambda x: x.a, QQ)
    assert (A @ B).det() == A.det() * B.det()


def test_restrict_examples():
    assert restrict_scalars(Matrix([[E2(1)]], E2)) == Matrix.identity(2)
    assert restrict_scalars(Matrix([[E2.gen]], E2)) == Matrix([[0, 2], [1, 0]])


@settings(max_examples=200)
@given(same_field(2))
def test_restrict_scalar_product(xs):
    # oracle: multiply first, then restrict
    x, y = xs
    F = QuadExtField(x.delta)
    R = lambda z: restrict_scalars(Matrix([[z]], F))
    assert R(x) @ R(y) == R(x * y)
    # acting on coordinates (a, b) of a + b delta
    v = Matrix([[y.a], [y.b]])
    xy = x * y
    assert R(x) @ v == Matrix([[xy.a], [xy.b]])


@settings(max_examples=40, deadline=None)
@given(square_matrices(2), square_matrices(2))
def test_restrict_ring_homomorphism(A, B):
    B = Matrix([[A.field(x.a, x.b) for x in r] for r in B.rows], A.field)
    for side in ("left", "right"):
        R = lambda M: restrict_scalars(M, side)
        assert R(A @ B) == R(A) @ R(B)
        assert R(A + B) == R(A) + R(B)
