import random
from fractions import Fraction

import pytest

from simtheta import siegel
from simtheta.doubling import DoubledSpace, GSpElement, NotLagrangian, build_doubled
from simtheta.exact import Matrix, QQ, QuadExtField, ShapeMismatch
from simtheta.hermitian import (HermitianSpace, NotIsometry, SplitSkewHermitianSpace, ZeroScale, d_scale,
                                project_isometry, random_g_similitude, random_h_similitude, random_unitary,
                                similitude_with_factor)
from simtheta.local import is_local_square

E2 = QuadExtField(2)


def space(m, r, gram=None):
    V = HermitianSpace.diagonal(gram or [1] * m, E2)
    W = SplitSkewHermitianSpace(r, E2)
    return V, W, build_doubled(V, W)


def test_dimensions_and_gram():
    V, W, D = space(1, 1)
    assert D.N == 2 and D.gram == siegel.standard_form(2, QQ)
    _, _, D = space(3, 2)
    assert D.N == 12


def test_coordinates_roundtrip_and_form():
    rng = random.Random(0)
    V, W, D = space(2, 1, [1, 3])
    for _ in range(30):
        X = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(W.n)] for _ in range(V.m)], E2)
        Xp = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(W.n)] for _ in range(V.m)], E2)
        assert D.from_coords(D.coords(X)) == X
        assert D.form(D.coords(X), D.coords(Xp)) == D.trace_form(X, Xp)
        assert D.trace_form(X, Xp) == -D.trace_form(Xp, X)


def test_form_matches_tensor_product():
    # <<v (x) w, v' (x) w'>> = 1/2 Tr((v, v') conj<w, w'>)
    rng = random.Random(1)
    V, W, D = space(2, 1, [1, -5])
    for _ in range(20):
        v = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3))] for _ in range(2)], E2)
        vp = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3))] for _ in range(2)], E2)
        w = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(2)]], E2)
        wp = Matrix([[E2(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(2)]], E2)
        expected = (V.pairing(v, vp) * W.pairing(w, wp).conj()).a
        assert D.trace_form(v @ w, vp @ wp) == expected


def test_iota_homomorphism_and_factor():
    rng = random.Random(2)
    for m, r in ((1, 1), (2, 1), (1, 2)):
        V, W, D = space(m, r)
        wit = [similitude_with_factor(V, 3)] if m % 2 == 0 else []
        for _ in range(100):
            g, gp = (random_g_similitude(V, rng, wit, 2) for _ in range(2))
            h, hp = (random_h_similitude(W, rng, Fraction(rng.randint(1, 7), rng.randint(1, 3)), 2)
                     for _ in range(2))
            a, b = D.iota(g, h), D.iota(gp, hp)
            assert D.iota(g @ gp, h @ hp) == a @ b
            assert a.nu == h.nu / g.nu == D.gsp_factor(a.mat)
            # the two factors commute
            assert D.iota_W(g) @ D.iota_V(h) == D.iota_V(h) @ D.iota_W(g)


def test_iota_errors():
    V, W, D = space(1, 1)
    with pytest.raises(ShapeMismatch):
        D.iota_V(d_scale(SplitSkewHermitianSpace(2, E2), 3))
    with pytest.raises(ShapeMismatch):
        DoubledSpace(V, SplitSkewHermitianSpace(1, QuadExtField(3)))
    with pytest.raises(ZeroScale):
        D.d_big(0)
    with pytest.raises(NotIsometry):
        D.bruhat_sp(D.d_big(5))


def test_d_and_projection():
    rng = random.Random(3)
    V, W, D = space(2, 1)
    assert D.iota_V(d_scale(W, 5)) == D.d_big(5)
    for _ in range(20):
        y = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 4))
        h = random_h_similitude(W, rng, y, 4)
        assert D.iota_V(h).sp_part() == D.iota_V(project_isometry(h, W))
        s = D.iota_V(project_isometry(h, W))
        assert s.twist(y) == D.d_big(y).inverse() @ s @ D.d_big(y)


def test_sp_bruhat_roundtrip():
    rng = random.Random(4)
    V, W, D = space(1, 2)
    cells = set()
    for _ in range(40):
        s = D.iota_V(random_unitary(W, rng, 5))
        b = D.bruhat_sp(s)
        assert b.p1 @ D.tau_big(b.j).mat @ b.p2 == s.mat
        assert siegel.in_parabolic(b.p1) and siegel.in_parabolic(b.p2)
        b2 = D.bruhat_sp(s, random.Random(rng.random()))
        assert b2.j == b.j and is_local_square(b.x_class / b2.x_class, 3)
        cells.add(b.j)
    assert cells <= {0, 2, 4}   # j(iota_V(h)) = 2 m j(h)


def test_iota_W_lands_in_parabolic():
    rng = random.Random(6)
    for m, r in ((1, 1), (2, 1), (1, 2), (3, 1)):
        V, W, D = space(m, r)
        wit = [similitude_with_factor(V, 3)] if m % 2 == 0 else []
        for _ in range(10):
            g = random_g_similitude(V, rng, wit, 2)
            s = D.iota_W(g).sp_part()
            assert siegel.in_parabolic(s.mat)
            x = siegel.levi_det(s.mat)
            assert is_local_square(x / g.mat.det().norm() ** r, 3)


def test_lagrangians():
    V, W, D = space(1, 1)
    assert D.Y_image(D.identity()) == D.Y
    A = siegel._random_invertible(D.N, QQ, random.Random(0))
    assert D.lagrangian_image(D.Y, GSpElement(siegel.siegel_levi(A), Fraction(1))) == D.Y
    assert D.lagrangian_image(D.Y, D.tau_big(2)) == D.X
    assert D.lagrangian_image(D.Y, D.tau_big(1)) not in (D.X, D.Y)
    with pytest.raises(NotLagrangian):
        D.lagrangian(Matrix([[1, 0, 0, 0], [0, 0, 1, 0]]))    # e1 and f1 pair to 1
    with pytest.raises(NotLagrangian):
        D.lagrangian(Matrix([[1, 0, 0, 0]]))


def test_basis_order_does_not_change_cells():
    rng = random.Random(5)
    V, W, _ = space(2, 1)
    D0 = build_doubled(V, W)
    order = list(range(4))
    rng.shuffle(order)
    D1 = build_doubled(V, W, x_order=order)
    for _ in range(20):
        h = random_unitary(W, rng, 4)
        b0, b1 = D0.bruhat_sp(D0.iota_V(h)), D1.bruhat_sp(D1.iota_V(h))
        assert b0.j == b1.j
    with pytest.raises(ValueError):
        build_doubled(V, W, x_order=[0, 0, 1, 2])
