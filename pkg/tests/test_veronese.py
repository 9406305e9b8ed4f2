import itertools

import pytest

from ringgeom import algebras as alg
from ringgeom import projective as pj
from ringgeom import veronese as vr


def test_veronese_point_images(algebra_cd_f3):
    A = algebra_cd_f3
    F = A.field
    zero, one = A.zero(), A.one()
    # (1, 0, 0) -> (1, 0, 0; 0, 0, 0)
    img = vr.veronese_point(A, ("P", 1, one, zero, zero))
    assert img == (1, 0, 0) + (0,) * 6
    # (0, 0, 1) -> (0, 0, 1; 0, 0, 0)
    img = vr.veronese_point(A, ("P", 0, zero, zero, one))
    assert img == (0, 0, 1) + (0,) * 6
    # (0, y, 1) -> (0, N(y), 1; y, 0, 0) up to normalization
    for y in A.elements():
        p = ("P", 0, zero, y, one)
        img = vr.veronese_point(A, p)
        vec = (F.zero, A.norm(y), F.one) + y + zero + zero
        assert img == pj.normalize_point(F, vec)


def test_build_counts(variety_f2, variety_f3):
    assert len(variety_f2.points) == 28 and variety_f2.ambient_pdim == 8
    assert len(variety_f3.points) == 117 and variety_f3.ambient_pdim == 8


def test_line_100_equations(variety_f3, algebra_cd_f3):
    # xi of [1, 0, 0] is cut out by K0 = A1 = A2 = 0 (five conditions)
    A = algebra_cd_f3
    plane = variety_f3.plane
    l = ("L", 1, A.one(), A.zero(), A.zero())
    li = plane.line_index[l]
    tube = variety_f3.tubes[li]
    assert tube.xi.pdim == 3
    for p in tube.xi_pts:
        assert p[0] == 0 and p[5:] == (0,) * 4
    # the X-points on it satisfy K1 K2 = n'(B00)
    F = A.field
    for p in tube.x_pts:
        assert F.mul(p[1], p[2]) == F.mul(p[3], p[3])


def test_tube_data(variety_f3):
    for t in variety_f3.tubes:
        assert t.fit_count == 1
        assert t.v == 0 and t.d_base == 1
        assert t.base_ovoid and t.base_witt == 1
        assert not (t.vertex_pts & variety_f3.point_set)


def test_tubic_space_intersection_point(variety_f3, algebra_cd_f3):
    A = algebra_cd_f3
    plane = variety_f3.plane
    l1 = ("L", 1, A.one(), A.zero(), A.zero())
    l2 = ("L", 0, A.zero(), A.one(), A.zero())
    t1 = variety_f3.tubes[plane.line_index[l1]]
    t2 = variety_f3.tubes[plane.line_index[l2]]
    inter = t1.xi_pts & t2.xi_pts
    assert inter == {(0, 0, 1, 0, 0, 0, 0, 0, 0)}
    assert inter <= variety_f3.point_set


def test_axioms_f2_f3(variety_f2, variety_f3):
    for v in (variety_f2, variety_f3):
        assert vr.check_h1(v)["ok"]
        assert vr.check_h2star(v)["ok"]
        assert vr.check_property_v(v)["ok"]


def test_singular_line_law_f3(variety_f3):
    # a line with >= 3 points in X u Y is singular with exactly one Y-point
    # when it meets X
    field = variety_f3.field
    y, verts, _ = vr.vertex_space_y(variety_f3)
    ypts = set(y.points())
    xpts = set(variety_f3.point_set)
    both = sorted(xpts | ypts)
    seen = set()
    for u, v in itertools.combinations(both, 2):
        line = frozenset(pj.line_points(field, u, v))
        if line in seen:
            continue
        seen.add(line)
        inside = line & (xpts | ypts)
        if len(inside) <= 2:
            continue
        assert inside == line        # singular
        if line & xpts:
            assert len(line & ypts) == 1


def test_unique_tube_law(variety_f3):
    # non-collinear points lie in exactly one tube
    field = variety_f3.field
    y, _, _ = vr.vertex_space_y(variety_f3)
    ypts = set(y.points())
    pts = variety_f3.points
    through = variety_f3.tubes_through
    for i, j in itertools.combinations(range(len(pts)), 2):
        line = set(pj.line_points(field, pts[i], pts[j]))
        collinear = bool(line & ypts)
        common = set(through[i]) & set(through[j])
        if not collinear:
            assert len(common) == 1
        else:
            assert len(common) > 1


def test_tube_intersection_dichotomy(variety_f3):
    # two distinct tubes meet in an X-point or a full generator
    for t1, t2 in itertools.combinations(variety_f3.tubes, 2):
        inter = t1.x_pts & t2.x_pts
        if len(inter) == 1:
            continue
        assert inter in set(t1.generators) and inter in set(t2.generators)


def test_tangent_space_complementarity(variety_f3):
    # T_x ^ Y = Pi_x^Y; T_x and <C*> complementary for vertices not
    # collinear with x
    field = variety_f3.field
    y, _, _ = vr.vertex_space_y(variety_f3)
    for pi in range(0, len(variety_f3.points), 29):
        tx = vr.tangent_space(variety_f3, pi)
        piy_rows = []
        for ti in variety_f3.tubes_through[pi]:
            piy_rows.extend(variety_f3.tubes[ti].vertex.rows)
        piy = pj.span(field, piy_rows, variety_f3.n)
        assert pj.meet(tx, y) == piy
        for t in variety_f3.tubes:
            if pj.meet(t.vertex, piy).rows:
                continue
            u = pj.meet(tx, t.xi)
            assert not u.rows
            assert pj.span_subspaces(field, [tx, t.xi]).vdim == variety_f3.n
            break


def test_tube_tangent_matches_combinatorial(variety_f3):
    t = variety_f3.tubes[0]
    x = sorted(t.x_pts)[0]
    via_form = vr.tube_tangent_space(variety_f3, t, x)
    via_lines = pj.ovoid_tangent_hyperplane(
        variety_f3.field, sorted(t.cone_pts), t.xi, x)
    assert via_form == via_lines


def test_vertex_space_f3(variety_f3):
    y, verts, rep = vr.vertex_space_y(variety_f3)
    assert y.pdim == 2
    assert rep["vertex_count"] == 13
    assert rep["covers"] and rep["pairwise_disjoint"]
    assert rep["regular_spread"]


def test_projection_f3(projection_f3):
    rep, data = projection_f3
    assert rep["fiber_sizes"] == [9]
    assert rep["x_prime_count"] == 13
    assert rep["f_cap_x_equals_projection"]
    assert rep["xi_cap_f_matches"]
    assert rep["mm1"] and rep["mm2star"]


def test_projection_with_arbitrary_complement(variety_f3, f3_field):
    # any complement of Y works for the projection; only the canonical
    # section is guaranteed to cut X in rho(X)
    y, _, _ = vr.vertex_space_y(variety_f3)
    F = pj.complement(y)
    rep, data = vr.project_from_y(variety_f3, F=F)
    assert rep["x_prime_count"] == 13
    assert rep["fiber_sizes"] == [9]
    assert rep["mm1"] and rep["mm2star"]


def test_fibers_are_pi_x(variety_f3, projection_f3):
    # rho^-1(rho(x)) = Pi_x, an affine (2v+2)-space over Pi_x^Y
    rep, data = projection_f3
    field = variety_f3.field
    for img, fib in data["fibers"].items():
        assert len(fib) == 9
        rows = []
        for ti in variety_f3.tubes_through[fib[0]]:
            rows.extend(variety_f3.tubes[ti].vertex.rows)
        piy = pj.span(field, rows, variety_f3.n)
        assert piy.pdim == 1                 # 2v + 1 with v = 0
        closure = pj.span(field, [variety_f3.points[i] for i in fib],
                          variety_f3.n)
        assert closure.pdim == 2             # 2v + 2


def test_chi_f3(variety_f3, projection_f3):
    rep, data = projection_f3
    chi, crep = vr.connection_chi(variety_f3, data)
    assert crep["bijective"] and crep["incidence_reversing"]
    assert crep["x_is_union"]
    assert crep["pstar_is_residue_plane"]
    assert crep["cross_ratio"] is True
    assert crep["hjelmslev"]["ok"]


def test_chi_preserves_harmonic_quadruple(variety_f3, projection_f3):
    # an ordering of four conic points with cross-ratio -1 maps to lines
    # of the pencil with cross-ratio -1
    field = variety_f3.field
    rep, data = projection_f3
    chi, _ = vr.connection_chi(variety_f3, data)
    minus_one = field.neg(field.one)
    found = False
    for key, qpts in data["quadrics"].items():
        v = data["vertices"][key]
        conic = sorted(qpts)
        plane_sub = pj.span(field, conic, variety_f3.n)
        import itertools as it
        for quad in it.permutations(conic):
            val = pj.conic_cross_ratio(field, plane_sub, conic, list(quad))
            if val != minus_one:
                continue
            imgs = [chi[p] for p in quad]
            from ringgeom import scrolls as sc
            tval = sc.spread_cross_ratio(field, imgs, v)
            assert tval == minus_one
            found = True
            break
        if found:
            break
    assert found


def test_equivalence_certificate_f3(variety_f3, projection_f3, f3_field):
    rep, data = projection_f3
    F = data["F"]
    xp = data["xprime"]
    pts1 = [pj.intrinsic_coords(F, p) for p in xp]
    idx1 = {p: i for i, p in enumerate(xp)}
    blocks1 = [tuple(sorted(idx1[p] for p in data["quadrics"][k]))
               for k in sorted(data["quadrics"])]
    direct = vr.build_variety(alg.ground_algebra(f3_field, "F3"))
    t = vr.projective_equivalence(f3_field, pts1, blocks1, direct.points,
                                  direct.blocks())
    assert t is not None
    # certify: t really maps points onto points
    img = {vr.apply_matrix(f3_field, t, p) for p in pts1}
    assert img == set(direct.points)


def test_local_structure_all_vertices_f3(variety_f3, projection_f3):
    rep, data = projection_f3
    verts = {t.vertex.rows: t.vertex for t in variety_f3.tubes}
    assert len(verts) == 13
    for v in verts.values():
        lrep = vr.local_structure_at_vertex(variety_f3, v, data)
        assert lrep["n_tubes"] == 9 and lrep["n_generators"] == 12
        assert lrep["dual_affine"]
        assert lrep["spread_regular"]
        assert lrep["chi_v_projectivity"] is True
        assert lrep["scroll_quadrics_match"]
        assert lrep["dim_span_cv"] == 5      # 3v + d + 4 at (d, v) = (1, 0)
        assert lrep["dim_formula_ok"] and lrep["v_equals_d_minus_1"]


def test_alpha_section_lands_in_y(variety_f3, projection_f3):
    # the affine section of two same-vertex projected tubes lies in the
    # projected vertex space
    from ringgeom import scrolls as sc
    field = variety_f3.field
    rep, data = projection_f3
    key = variety_f3.tubes[0].vertex.rows
    vertex = variety_f3.tubes[0].vertex
    cv = [t for t in variety_f3.tubes if t.vertex.rows == key]
    c0, c1 = cv[0], cv[1]
    ftilde_rows = list(data["F"].rows)
    n = variety_f3.n
    for i in range(n):
        e = tuple(field.one if j == i else field.zero for j in range(n))
        test, _ = pj.rref(field, list(vertex.rows) + ftilde_rows + [e])
        if len(test) > vertex.vdim + len(ftilde_rows):
            ftilde_rows.append(e)
        if vertex.vdim + len(ftilde_rows) == n:
            break
    proj_v = pj.Projection(vertex, pj.span(field, ftilde_rows, n))
    ytilde = set(pj.span(field, [p for p in (proj_v.apply(r)
                                             for r in data["y"].rows)
                                 if p is not None], n).points())

    def gen_images(tube):
        # keyed by the fiber (the projection-from-Y image), which matches
        # generators of same-vertex tubes through collinearity
        out = {}
        for g in tube.generators:
            img = {proj_v.apply(x) for x in g}
            assert len(img) == 1
            fiber = {data["images"][variety_f3.point_index[x]] for x in g}
            assert len(fiber) == 1
            out[fiber.pop()] = img.pop()
        return out

    g0, g1 = gen_images(c0), gen_images(c1)
    assert set(g0) == set(g1)
    shared_keys = [k for k in g0 if g0[k] == g1[k]]
    assert len(shared_keys) == 1          # the common generator
    shared = g0[shared_keys[0]]
    pairing = [(g0[k], g1[k]) for k in sorted(g0) if g0[k] != g1[k]]
    al, images, inf_space = sc.alpha_section(field, pairing, shared, n)
    assert set(images) <= ytilde
    assert set(inf_space.points()) <= ytilde


def test_counterexample_pg13(counterexample):
    ce = counterexample
    assert len(ce.points) == 1080
    assert len(ce.tubes) == 1170
    rows, _ = pj.rref(ce.field, ce.points)
    assert len(rows) == 14               # X spans PG(13, 3)
    assert vr.check_tubes(ce, d_base=1, v=1)["ok"]
    assert vr.check_h1(ce)["ok"]
    assert vr.check_h2(ce)["ok"]
    wit = vr.check_h2star_violation(ce)
    assert wit is not None
    t1, t2 = ce.tubes[wit[0]], ce.tubes[wit[1]]
    assert not (t1.xi_pts & t2.xi_pts)


def test_counterexample_h3(counterexample):
    rep = vr.check_h3(counterexample, 6)
    assert rep["ok"] and rep["tangent_dims"] == {6: 1080}


def test_counterexample_field_guard(f2_field):
    with pytest.raises(pj.GeometryError):
        vr.build_h2_counterexample(f2_field)


def test_equivalence_rejects_distinct_structures(f2_field):
    from ringgeom import f2geom as f2
    ex = f2.d1_q2_examples()
    a, b = ex["frame5"], ex["frame4_plus_point"]
    t = vr.projective_equivalence(f2_field, a.points, a.blocks(),
                                  b.points, b.blocks(), exhaust=True)
    assert t is None
