import itertools

import pytest

from ringgeom.fields import GF
from ringgeom import projective as pj
from ringgeom import scrolls as sc


def test_normal_rational_curve_conic():
    F3 = GF(3)
    pts = sc.normal_rational_curve(F3, 2)
    assert len(pts) == 4
    for trio in itertools.combinations(pts, 3):
        rows, _ = pj.rref(F3, list(trio))
        assert len(rows) == 3        # no three collinear


def test_normal_rational_curve_line():
    F3 = GF(3)
    pts = sc.normal_rational_curve(F3, 1)
    assert sorted(pts) == sorted(pj.pg_points(F3, 2))


def test_normal_rational_curve_m3_q5():
    pts = sc.normal_rational_curve(GF(5), 3)
    assert len(pts) == 6
    rows, _ = pj.rref(GF(5), pts)
    assert len(rows) == 4


@pytest.mark.parametrize("q", [2, 3, 4])
def test_field_reduction_spread_regular(q):
    sp = sc.regular_spread(2, q)
    assert len(sp.members) == q * q + 1
    assert sc.is_regular_spread(sp)


def test_pg32_spread_has_5_lines():
    sp = sc.regular_spread(2, 2)
    assert len(sp.members) == 5


def test_regulus_q3_has_4_lines():
    sp = sc.regular_spread(2, 3)
    reg = sc.regulus(sp.members[0], sp.members[1], sp.members[2])
    assert len(reg) == 4


def test_regulus_requires_disjoint_inputs():
    sp = sc.regular_spread(2, 3)
    line = sp.members[0]
    with pytest.raises(pj.GeometryError):
        sc.regulus(line, line, sp.members[1])


def test_line_spread_of_pg52_from_field_reduction():
    sp = sc.regular_spread(2, 2, m=3)
    assert len(sp.members) == 21
    assert sc.is_regular_spread(sp)


@pytest.mark.parametrize("q,expected", [(3, 9), (4, 16)])
def test_cubic_scroll_conics(q, expected):
    F = GF(q)
    s = sc.canonical_cubic_scroll(F)
    quads = sc.scroll_quadrics(s)
    assert len(quads) == expected
    ok, info = sc.verify_unique_quadrics(s, quads)
    assert ok, info


def test_cubic_scroll_through_pair_errors():
    F = GF(3)
    s = sc.canonical_cubic_scroll(F)
    quads = sc.scroll_quadrics(s)
    spread_pts = set(s.spread_side.points())
    t0 = sorted(s.point_sets[0] - spread_pts)
    with pytest.raises(pj.GeometryError):
        sc.quadric_through(s, quads, t0[0], t0[1])   # same transversal
    lpt = sorted(s.point_sets[0] & spread_pts)[0]
    other = sorted(s.point_sets[1] - spread_pts)[0]
    with pytest.raises(pj.GeometryError):
        sc.quadric_through(s, quads, lpt, other)     # on the line side


def test_cubic_scroll_tangent_planes_at_base_point():
    # all tangent lines at a fixed conic point c to the scroll conics lie
    # in the plane spanned by phi(c) and the tangent line of C at c
    F = GF(3)
    s = sc.canonical_cubic_scroll(F)
    quads = sc.scroll_quadrics(s)
    c = s.quadric_pts[0]
    phi_c = s.members[0].rows[0]
    conic_plane = pj.span(F, list(s.quadric_pts), s.n)
    base_forms = pj.exact_zero_set_forms(
        F, [pj.intrinsic_coords(conic_plane, p) for p in s.quadric_pts], 3)
    ci = pj.intrinsic_coords(conic_plane, c)
    row = tuple(base_forms[0].bilinear(ci, tuple(
        F.one if j == i else F.zero for j in range(3))) for i in range(3))
    tang = pj.span(F, [pj.from_intrinsic(conic_plane, r)
                       for r in pj.nullspace(F, [row], 3)], s.n)
    target = pj.span(F, [phi_c] + list(tang.rows), s.n)
    for pts, (u, qf) in quads.items():
        if c not in pts:
            continue
        ciq = pj.intrinsic_coords(u, c)
        row = tuple(qf.bilinear(ciq, tuple(
            F.one if j == i else F.zero for j in range(u.vdim)))
            for i in range(u.vdim))
        tline = pj.span(F, [pj.from_intrinsic(u, r)
                            for r in pj.nullspace(F, [row], u.vdim)], s.n)
        assert tline <= target


@pytest.mark.parametrize("q", [3, 4])
def test_regular_2_scroll(q):
    s = sc.canonical_regular_scroll(2, q)
    quads = sc.scroll_quadrics(s)
    assert len(quads) == q ** 4
    ok, info = sc.verify_unique_quadrics(s, quads)
    assert ok, info


@pytest.mark.parametrize("d,q", [(1, 3), (1, 4), (2, 3)])
def test_canonical_pairings_are_projectivities(d, q):
    s = sc.canonical_cubic_scroll(GF(q)) if d == 1 \
        else sc.canonical_regular_scroll(d, q)
    assert sc.pairing_is_projectivity(s) is True


def test_regular_1_scroll_agrees_with_cubic_scroll():
    # d = 1 regular scrolls are normal rational cubic scrolls: same
    # transversal count, same quadric family size, same uniqueness and
    # pairwise behavior
    q = 3
    cubic = sc.canonical_cubic_scroll(GF(q))
    reg1 = sc.canonical_regular_scroll(1, q)
    assert len(cubic.transversals) == len(reg1.transversals) == q + 1
    qc = sc.scroll_quadrics(cubic)
    qr = sc.scroll_quadrics(reg1)
    assert len(qc) == len(qr) == q * q
    assert sc.verify_unique_quadrics(cubic, qc)[0]
    assert sc.verify_unique_quadrics(reg1, qr)[0]


def test_alpha_section_cubic_scroll():
    # two scroll conics through a common point: the transversal lines have
    # an affine line section, and the induced map preserves cross-ratio
    F = GF(3)
    s = sc.canonical_cubic_scroll(F)
    quads = sc.scroll_quadrics(s)
    keys = sorted(quads)
    pairs_checked = 0
    for k1, k2 in itertools.combinations(keys, 2):
        shared = set(k1) & set(k2)
        if len(shared) != 1:
            continue
        c = shared.pop()
        side1 = {s.transversal_index_of(p): p for p in k1 if p != c}
        side2 = {s.transversal_index_of(p): p for p in k2 if p != c}
        pairing = [(side1[i], side2[i]) for i in sorted(side1)]
        al, images, inf_space = sc.alpha_section(F, pairing, c, s.n)
        assert len(images) == F.q
        u1, qf1 = quads[k1]
        for quad in itertools.permutations(sorted(k1)):
            val = pj.conic_cross_ratio(
                F, pj.span(F, list(k1), s.n), list(k1), list(quad))
            imgs = []
            for p in quad:
                if p == c:
                    imgs.append(inf_space.rows[0])
                else:
                    imgs.append(images[sorted(side1).index(
                        s.transversal_index_of(p))])
            assert pj.cross_ratio(F, *imgs) == val
        pairs_checked += 1
        if pairs_checked >= 6:
            break
    assert pairs_checked


def test_alpha_section_regular_2_scroll_q3():
    F = GF(3)
    s = sc.canonical_regular_scroll(2, 3)
    quads = sc.scroll_quadrics(s)
    keys = sorted(quads)
    done = 0
    for k1, k2 in itertools.combinations(keys, 2):
        shared = set(k1) & set(k2)
        if len(shared) != 1:
            continue
        c = shared.pop()
        side1 = {s.transversal_index_of(p): p for p in k1 if p != c}
        side2 = {s.transversal_index_of(p): p for p in k2 if p != c}
        order = sorted(side1)
        pairing = [(side1[i], side2[i]) for i in order]
        al, images, inf_space = sc.alpha_section(F, pairing, c, s.n)
        assert len(images) == 9 and inf_space.pdim == 1
        done += 1
        if done >= 3:
            break
    assert done == 3
