import itertools
import random

import pytest

from ringgeom.fields import GF
from ringgeom import projective as pj
from ringgeom.projective import (span, meet, complement,
                                 normalize_point, fit_quadric,
                                 QuadricFitError, quadratic_form,
                                 quadric_zero_set, quadric_vertex,
                                 witt_index, is_ovoid, cross_ratio, INF,
                                 Projection, exact_zero_set_forms)


def test_pg_point_counts():
    for n, q in [(3, 2), (3, 3), (4, 2), (5, 3), (9, 2)]:
        assert len(pj.pg_points(GF(q), n)) == (q ** n - 1) // (q - 1)


def test_meet_of_hyperplanes_pg42():
    F = GF(2)
    h1 = span(F, [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0),
                  (0, 0, 0, 1, 0)])
    h2 = span(F, [(0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0),
                  (0, 0, 0, 0, 1)])
    assert meet(h1, h2).pdim == 2


def test_span_of_frame_is_whole_space():
    F = GF(2)
    frame = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
             (1, 1, 1, 1)]
    assert span(F, frame).pdim == 3


def test_complement_properties():
    F = GF(3)
    s = span(F, [(1, 0, 2, 1, 0), (0, 1, 1, 1, 2)])
    c = complement(s)
    assert not meet(s, c).rows
    assert pj.span_subspaces(F, [s, c]).vdim == 5


def test_ambient_mismatch_errors():
    F = GF(2)
    s = span(F, [(1, 0)])
    t = span(F, [(1, 0, 0)])
    with pytest.raises(pj.GeometryError):
        meet(s, t)


def test_fit_quadric_underdetermined():
    F = GF(2)
    conic = [(1, 0, 0), (0, 0, 1), (1, 1, 1)]  # on x0 x2 = x1^2
    with pytest.raises(QuadricFitError) as e:
        fit_quadric(F, conic, 3)
    assert e.value.nullity == 3


def test_fit_quadric_recovers_conic_over_f5():
    F = GF(5)
    qf = quadratic_form(F, 3, {(0, 2): 1, (1, 1): F.neg(1)})
    pts = quadric_zero_set(qf)
    assert len(pts) == 6
    fitted = fit_quadric(F, pts, 3)
    assert set(quadric_zero_set(fitted)) == set(pts)


@pytest.mark.parametrize("q", [2, 3])
def test_elliptic_quadric_pg3(q):
    # x0 x1 + n(x2, x3) with n an irreducible binary quadratic
    F = GF(q)
    if q == 2:
        coeffs = {(0, 1): 1, (2, 2): 1, (2, 3): 1, (3, 3): 1}
    else:
        coeffs = {(0, 1): 1, (2, 2): 1, (3, 3): 1}
    qf = quadratic_form(F, 4, coeffs)
    pts = quadric_zero_set(qf)
    assert len(pts) == q * q + 1
    assert quadric_vertex(qf).pdim == -1
    assert witt_index(qf) == 1
    ambient = span(F, [tuple(F.one if j == i else F.zero for j in range(4))
                       for i in range(4)])
    assert is_ovoid(F, pts, ambient)


def test_hyperbolic_quadric_witt_2():
    F = GF(3)
    qf = quadratic_form(F, 4, {(0, 1): 1, (2, 3): 1})
    assert witt_index(qf) == 2


def test_cone_vertex_and_projection():
    # cone over a conic: x0 x1 = x2^2 in PG(3, 3), vertex (0,0,0,1)
    F = GF(3)
    qf = quadratic_form(F, 4, {(0, 1): 1, (2, 2): F.neg(1)})
    v = quadric_vertex(qf)
    assert v.pdim == 0 and v.rows[0] == (0, 0, 0, 1)
    zeros = quadric_zero_set(qf)
    for r in v.points():
        assert qf.evaluate(r) == F.zero
    # projecting the zero set from the vertex leaves a vertex-free conic
    proj = Projection(v, complement(v))
    imgs = sorted({proj.apply(p) for p in zeros if not v.contains(p)})
    forms = exact_zero_set_forms(F, [pj.intrinsic_coords(complement(v), p)
                                     for p in imgs], 3)
    assert forms and all(quadric_vertex(f).pdim == -1 for f in forms[:1])


def test_frame_is_not_ovoid():
    F = GF(2)
    ambient = span(F, [tuple(F.one if j == i else F.zero for j in range(4))
                       for i in range(4)])
    frame4 = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    assert not is_ovoid(F, frame4, ambient)


def test_conic_is_ovoid():
    F = GF(3)
    qf = quadratic_form(F, 3, {(0, 2): 1, (1, 1): F.neg(1)})
    pts = quadric_zero_set(qf)
    plane = span(F, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert is_ovoid(F, pts, plane)


def test_cross_ratio_harmonic():
    F = GF(5)
    cr = cross_ratio(F, (1, 0), (0, 1), (1, 1), (1, F.neg(1)))
    assert cr == F.neg(1)


def test_cross_ratio_degenerate_convention():
    # with the (l1-l3)(l2-l4) / ((l1-l4)(l2-l3)) arrangement, p4 = p1
    # zeroes the denominator, so the conventional value is infinity
    F = GF(5)
    assert cross_ratio(F, (1, 0), (0, 1), (1, 1), (1, 0)) == INF
    assert cross_ratio(F, (1, 0), (0, 1), (1, 0), (1, 1)) == F.zero


def test_cross_ratio_noncollinear_errors():
    F = GF(3)
    with pytest.raises(pj.GeometryError):
        cross_ratio(F, (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))


def test_cross_ratio_reparametrization_invariance():
    F = GF(5)
    rng = random.Random(0)
    count = 0
    while count < 1000:
        # four points on the line spanned by u, v with distinct parameters
        lams = rng.sample(range(6), 4)   # 5 affine slots + infinity

        def pt(l, u, v):
            if l == 5:
                return v
            return normalize_point(F, pj.vec_add(
                F, u, pj.vec_scale(F, l, v)))
        u, v = (1, 0), (0, 1)
        quad = [pt(l, u, v) for l in lams]
        base = cross_ratio(F, *quad)
        # random invertible reparametrization of the line
        while True:
            m = [[rng.randrange(5) for _ in range(2)] for _ in range(2)]
            det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % 5
            if det:
                break
        quad2 = [normalize_point(F, pj.vec_mat(F, p, m)) for p in quad]
        assert cross_ratio(F, *quad2) == base
        count += 1


def test_modular_law_seeded():
    # span(x, meet(y, z)) == meet(span(x, y), z) whenever x <= z
    F = GF(3)
    rng = random.Random(1)
    n = 7

    def random_subspace(k):
        rows = [tuple(rng.randrange(3) for _ in range(n)) for _ in range(k)]
        return span(F, rows, n)

    for _ in range(1000):
        z = random_subspace(rng.randint(3, 6))
        if not z.rows:
            continue
        xrows = [z.rows[i] for i in
                 sorted(rng.sample(range(z.vdim), max(1, z.vdim // 2)))]
        x = span(F, xrows, n)
        y = random_subspace(rng.randint(2, 5))
        lhs = pj.span_subspaces(F, [x, meet(y, z)])
        rhs = meet(pj.span_subspaces(F, [x, y]), z)
        assert lhs == rhs


def test_subspace_equality_is_canonical():
    F = GF(2)
    s1 = span(F, [(1, 1, 0), (0, 1, 1)])
    s2 = span(F, [(1, 0, 1), (0, 1, 1)])
    assert s1 == s2 and s1.rows == s2.rows


def test_json_serialization_roundtrip():
    F = GF(3)
    s = span(F, [(1, 0, 2), (0, 1, 1)])
    assert pj.subspace_from_json(F, 3, pj.subspace_to_json(s)) == s
    qf = quadratic_form(F, 3, {(0, 2): 1, (1, 1): 2})
    data = pj.quadric_to_json(qf)
    assert data == {"0,2": 1, "1,1": 2}
    assert pj.quadric_from_json(F, 3, data) == qf
    p = (1, 2, 0)
    assert pj.point_from_json(F, pj.point_to_json(F, p)) == p


def test_char2_forms_kept_upper_triangular():
    # in char 2 the bilinearization of x0 x1 is alternating and would not
    # determine the form; the stored table must survive the round trip
    F = GF(2)
    qf = quadratic_form(F, 2, {(0, 0): 1, (0, 1): 1})
    assert qf.evaluate((1, 0)) == F.one
    assert qf.evaluate((1, 1)) == F.zero
    assert qf.bilinear((1, 0), (1, 0)) == F.zero
