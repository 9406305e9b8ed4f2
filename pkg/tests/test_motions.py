import itertools
import random

import pytest

from ringgeom import algebras as alg
from ringgeom import hjplane as hp
from ringgeom import motions as mo


@pytest.fixture(scope="module")
def plane_f2(algebra_cd_f2):
    return hp.build_plane(algebra_cd_f2)


@pytest.fixture(scope="module")
def plane_f3(algebra_cd_f3):
    return hp.build_plane(algebra_cd_f3)


def test_phi23_zero_is_identity(algebra_cd_f2, plane_f2):
    em = mo.elation(algebra_cd_f2, "phi23", algebra_cd_f2.zero())
    pp, lp = mo.materialize(em, plane_f2)
    assert pp == tuple(range(len(plane_f2.points)))
    assert lp == tuple(range(len(plane_f2.lines)))


def test_phi23_fixes_axis_and_center_pencil(algebra_cd_f2, plane_f2):
    A = algebra_cd_f2
    axis = ("L", 2, A.zero(), A.zero(), A.one())          # [0, 0, 1]
    center = ("P", 2, A.zero(), A.one(), A.zero())        # (0, 1, 0)
    axis_pts = [p for p in plane_f2.points
                if hp.incidence_value(A, p, axis) == A.zero()]
    for Y in A.elements():
        em = mo.elation(A, "phi23", Y)
        for p in axis_pts:
            assert em.apply_point(p) == p
        for l in plane_f2.lines:
            if hp.incidence_value(A, center, l) == A.zero():
                assert em.apply_line(l) == l


def test_elation_additivity_f3_exhaustive(algebra_cd_f3, plane_f3):
    A = algebra_cd_f3
    mats = {x: mo.materialize(mo.elation(A, "phi13", x), plane_f3)[0]
            for x in A.elements()}
    for x1 in A.elements():
        for x2 in A.elements():
            assert mo.perm_mul(mats[x1], mats[x2]) == mats[A.add(x1, x2)]


def test_elations_preserve_incidence_and_neighbouring(algebra_cd_f2,
                                                      plane_f2):
    A = algebra_cd_f2
    for kind in ("phi23", "phi13"):
        for Y in A.elements():
            em = mo.elation(A, kind, Y)
            ok, wit = mo.preserves_incidence(em, plane_f2)
            assert ok, (kind, Y, wit)
            ok, wit = mo.preserves_neighbouring(em, plane_f2)
            assert ok, (kind, Y, wit)


@pytest.mark.parametrize("fixture", ["algebra_cd_f2", "algebra_cd_f3"])
def test_triality_order_three(fixture, request):
    A = request.getfixturevalue(fixture)
    plane = hp.build_plane(A)
    tau = mo.triality(A)
    pp, lp = mo.materialize(tau, plane)
    ident = tuple(range(len(pp)))
    assert mo.perm_mul(pp, mo.perm_mul(pp, pp)) == ident
    assert mo.perm_mul(lp, mo.perm_mul(lp, lp)) == tuple(range(len(lp)))
    ok, wit = mo.preserves_incidence(tau, plane)
    assert ok, wit


def test_triality_deep_point_case(algebra_cd_f2):
    A = algebra_cd_f2
    tau = mo.triality(A)
    x1 = (A.field.one,)
    z1 = (A.field.one,)
    p = ("P", 2, A.t_times(x1), A.one(), A.t_times(z1))
    assert tau.apply_point(p) == ("P", 0, A.t_times(z1), A.t_times(x1),
                                  A.one())


def test_conjugation_by_triality_gives_other_elations(algebra_cd_f2,
                                                      plane_f2):
    # tau phi23(Y) tau^-1 is again a collineation fixing a flag pencil
    A = algebra_cd_f2
    tau = mo.triality(A)
    tau2 = mo.compose(tau, tau)
    for Y in A.elements():
        g = mo.compose(tau, mo.compose(mo.elation(A, "phi23", Y), tau2))
        ok, _ = mo.preserves_incidence(g, plane_f2)
        assert ok


def test_tau_lift_is_coordinate_shuffle(algebra_cd_f2):
    A = algebra_cd_f2
    M = mo.linear_lift(A, "tau")
    n = 3 * A.dim + 3
    v = tuple(range(1, n + 1))
    F = A.field
    img = mo.pj.vec_mat(F, tuple(x % 2 for x in v), M)
    # (x,y,z;xi,ups,zeta) -> (z,x,y;zeta,xi,ups)
    x, y, z = 1 % 2, 2 % 2, 3 % 2
    m = A.dim
    xi = tuple((4 + i) % 2 for i in range(m))
    ups = tuple((4 + m + i) % 2 for i in range(m))
    zeta = tuple((4 + 2 * m + i) % 2 for i in range(m))
    assert img == (z, x, y) + zeta + xi + ups


def test_phi_lift_identity(algebra_cd_f3):
    A = algebra_cd_f3
    M = mo.linear_lift(A, "phi", X=A.zero(), Y=A.zero())
    n = 3 * A.dim + 3
    F = A.field
    ident = [tuple(F.one if j == i else F.zero for j in range(n))
             for i in range(n)]
    assert M == ident


def test_equivariance_exhaustive_f2(algebra_cd_f2, variety_f2):
    from ringgeom import veronese as vr
    A = algebra_cd_f2
    y, _, _ = vr.vertex_space_y(variety_f2)
    ypts = y.points()
    for X in A.elements():
        for Y in A.elements():
            M = mo.linear_lift(A, "phi", X=X, Y=Y)
            g = mo.compose(mo.elation(A, "phi13", X),
                           mo.elation(A, "phi23", Y))
            ok, wit = mo.verify_equivariance(M, g, variety_f2)
            assert ok, (X, Y, wit)
            assert mo.lift_stabilizes(M, variety_f2)
            assert mo.lift_stabilizes_points(M, A.field, ypts)
    tauM = mo.linear_lift(A, "tau")
    assert mo.lift_stabilizes_points(tauM, A.field, ypts)


def test_equivariance_sampled_f3(algebra_cd_f3, variety_f3):
    A = algebra_cd_f3
    rng = random.Random(0)
    elems = A.elements()
    for _ in range(20):
        X = elems[rng.randrange(len(elems))]
        Y = elems[rng.randrange(len(elems))]
        M = mo.linear_lift(A, "phi", X=X, Y=Y)
        g = mo.compose(mo.elation(A, "phi13", X),
                       mo.elation(A, "phi23", Y))
        ok, wit = mo.verify_equivariance(M, g, variety_f3)
        assert ok, (X, Y, wit)


def test_group_order_s3():
    g1 = (1, 0, 2)
    g2 = (1, 2, 0)
    assert mo.group_order([g1, g2]) == 6


def test_group_order_cap():
    g = tuple((i + 1) % 11 for i in range(11))
    with pytest.raises(mo.MotionError):
        mo.group_order([g], cap=5)


def test_transitivity_on_pairs_f2(algebra_cd_f2, plane_f2):
    A = algebra_cd_f2
    gens = [mo.materialize(mo.triality(A), plane_f2)[0]]
    for Y in A.elements():
        gens.append(mo.materialize(mo.elation(A, "phi23", Y), plane_f2)[0])
        gens.append(mo.materialize(mo.elation(A, "phi13", Y), plane_f2)[0])
    pts = plane_f2.points
    nb, far = [], []
    for i, j in itertools.combinations(range(len(pts)), 2):
        (nb if plane_f2.point_neighbouring(pts[i], pts[j])
         else far).append((i, j))
    assert len(mo.pair_orbit(gens, nb[0])) == len(nb)
    assert len(mo.pair_orbit(gens, far[0])) == len(far)
    assert len(mo.point_orbit(gens, 0)) == len(pts)
