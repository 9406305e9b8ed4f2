"""Collineations of G(2, A): the two elation families and the triality
map, their induced linear action on the ambient projective space of the
Veronese variety, and permutation-group order computation by closure.

The conjugates of the elations under the triality map are obtained by
map composition, never by re-derived formulas.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from . import projective as pj
from .projective import normalize_point

BFS_CAP_ENV = "RINGGEOM_BFS_CAP"
DEFAULT_BFS_CAP = 2 * 10 ** 5


class MotionError(ValueError):
    pass


@dataclass
class PlaneMap:
    name: str
    algebra: object
    point_map: object
    line_map: object

    def apply_point(self, p):
        return self.point_map(p)

    def apply_line(self, l):
        return self.line_map(l)


def compose(f, g):
    """f after g."""
    return PlaneMap("%s*%s" % (f.name, g.name), f.algebra,
                    lambda p: f.point_map(g.point_map(p)),
                    lambda l: f.line_map(g.line_map(l)))


def _has_radical_t(A):
    """True for the CD(B, 0) shape (t^2 = 0); False for division algebras,
    where tB = {0} and the t-corrections all vanish."""
    cached = getattr(A, "_radical_t", None)
    if cached is None:
        if A.base_dim >= A.dim:
            cached = False
        else:
            t = A.basis(A.base_dim)
            cached = A.mul(t, t) == A.zero()
        object.__setattr__(A, "_radical_t", cached)
    return cached


def _is_t_multiple(A, a):
    if _has_radical_t(A):
        return all(c == A.field.zero for c in A.b_part(a))
    return a == A.zero()


def _t_mul(A, a):
    """t * a (kills the t-part of a)."""
    return A.t_times(A.b_part(a)) if _has_radical_t(A) else A.zero()


def _t_slot(A, a):
    """b as an element of A, for a template slot holding a = t*b."""
    if not _has_radical_t(A):
        return A.zero()
    return A.embed_b(A.t_part(a))


def elation(A, kind, param):
    """phi_23(Y) (center (0,1,0), axis [0,0,1]) or phi_13(X) (center
    (1,0,0), same axis), by the explicit case formulas."""
    one = A.one()
    if kind == "phi23":
        Y = param
        Yc = A.conj(Y)

        def pmap(p):
            _, tag, x, y, z = p
            if tag == 0:
                return ("P", 0, x, A.add(y, Y), z)
            if tag == 1:
                # sign differs from the printed formula: the plus is forced
                # by incidence preservation and the lift equivariance
                corr = _t_mul(A, A.mul(Yc, _t_slot(A, z)))
                return ("P", 1, x, A.add(y, corr), z)
            return p

        def lmap(l):
            _, tag, a, b, c = l
            if tag == 0:
                return ("L", 0, a, b, A.sub(c, Y))
            if tag == 1:
                corr = _t_mul(A, A.mul(Y, _t_slot(A, b)))
                return ("L", 1, a, b, A.sub(c, corr))
            return l
        return PlaneMap("phi23(%s)" % A.label(Y), A, pmap, lmap)
    if kind == "phi13":
        X = param
        Xc = A.conj(X)

        def pmap(p):
            _, tag, x, y, z = p
            if tag == 0:
                return ("P", 0, A.add(x, X), y, z)
            if tag == 1:
                corr = _t_mul(A, A.mul(A.mul(Xc, A.conj(y)), _t_slot(A, z)))
                return ("P", 1, x, A.sub(y, corr), z)
            corr = _t_mul(A, A.mul(Xc, _t_slot(A, z)))
            return ("P", 2, A.add(x, corr), y, z)

        def lmap(l):
            _, tag, a, b, c = l
            if tag == 0:
                return ("L", 0, a, b, A.sub(c, A.mul(a, X)))
            if tag == 1:
                return ("L", 1, a, b, A.sub(c, X))
            return l
        return PlaneMap("phi13(%s)" % A.label(X), A, pmap, lmap)
    raise MotionError("unknown elation kind %r" % kind)


def triality(A):
    """The order-3 map with inverse tau^2; total case dispatch."""
    one = A.one()

    def pmap(p):
        _, tag, x, y, z = p
        if tag == 0:
            if not _is_t_multiple(A, y):
                yi = A.inverse(y)
                return ("P", 0, yi, A.mul(x, yi), one)
            return ("P", 1, one, x, y)
        if tag == 1:
            if not _is_t_multiple(A, y):
                yi = A.inverse(y)
                return ("P", 0, _t_mul(A, A.mul(yi, _t_slot(A, z))), yi, one)
            return ("P", 2, z, one, y)
        return ("P", 0, z, x, one)

    def lmap(l):
        _, tag, a, b, c = l
        if tag == 0:
            if not _is_t_multiple(A, a):
                ai = A.inverse(a)
                return ("L", 0, A.mul(ai, c), one, ai)
            if not _is_t_multiple(A, c):
                ci = A.inverse(c)
                return ("L", 1, one,
                        _t_mul(A, A.mul(A.conj(ci), _t_slot(A, a))), ci)
            return ("L", 2, c, a, one)
        if tag == 1:
            return ("L", 0, c, one, b)
        return ("L", 1, one, a, b)
    return PlaneMap("tau", A, pmap, lmap)


def materialize(plane_map, plane):
    """Point and line permutations as index tuples; checks bijectivity."""
    pperm = []
    for p in plane.points:
        q = plane_map.apply_point(p)
        if q not in plane.point_index:
            raise MotionError("image %r is not a plane point" % (q,))
        pperm.append(plane.point_index[q])
    lperm = []
    for l in plane.lines:
        m = plane_map.apply_line(l)
        if m not in plane.line_index:
            raise MotionError("image %r is not a plane line" % (m,))
        lperm.append(plane.line_index[m])
    if len(set(pperm)) != len(pperm) or len(set(lperm)) != len(lperm):
        raise MotionError("map is not bijective")
    return tuple(pperm), tuple(lperm)


def preserves_incidence(plane_map, plane):
    pperm, lperm = materialize(plane_map, plane)
    for li, on in enumerate(plane.points_on):
        img_line = lperm[li]
        img_set = set(plane.points_on[img_line])
        for pi in on:
            if pperm[pi] not in img_set:
                return False, (pi, li)
    return True, None


def preserves_neighbouring(plane_map, plane):
    pperm, _ = materialize(plane_map, plane)
    pts = plane.points
    for i, j in itertools.combinations(range(len(pts)), 2):
        before = plane.point_neighbouring(pts[i], pts[j])
        after = plane.point_neighbouring(pts[pperm[i]], pts[pperm[j]])
        if before != after:
            return False, (i, j)
    return True, None


# --------------------------------------------------------------------------
# linear lifts on PG(3d+2, K)

def _block_layout(A):
    m = A.dim
    return [(0, 1), (1, 1), (2, 1), (3, m), (3 + m, m), (3 + 2 * m, m)]


def linear_lift(A, kind, X=None, Y=None):
    """Matrix of phi(X, Y) or of the triality shuffle, acting on row
    vectors in the (x, y, z; xi, ups, zeta) block coordinates."""
    field = A.field
    m = A.dim
    n = 3 * m + 3
    zero = A.zero()
    X = X if X is not None else zero
    Y = Y if Y is not None else zero

    def unpack(v):
        return (v[0], v[1], v[2], tuple(v[3:3 + m]),
                tuple(v[3 + m:3 + 2 * m]), tuple(v[3 + 2 * m:]))

    def pack(x, y, z, xi, ups, zeta):
        return (x, y, z) + tuple(xi) + tuple(ups) + tuple(zeta)

    if kind == "tau":
        def image(v):
            x, y, z, xi, ups, zeta = unpack(v)
            return pack(z, x, y, zeta, xi, ups)
    elif kind == "phi":
        Xc, Yc = A.conj(X), A.conj(Y)
        nX, nY = A.norm(X), A.norm(Y)
        XYc = A.mul(X, Yc)

        def image(v):
            x, y, z, xi, ups, zeta = unpack(v)
            xq = field.add(x, field.add(A.trace(A.mul(X, ups)),
                                        field.mul(nX, z)))
            yq = field.add(y, field.add(A.trace(A.mul(Y, A.conj(xi))),
                                        field.mul(nY, z)))
            xi_q = A.add(xi, A.scale(z, Y))
            ups_q = A.add(ups, A.scale(z, Xc))
            zeta_q = A.add(zeta, A.add(A.mul(A.conj(ups), Yc),
                                       A.add(A.mul(X, A.conj(xi)),
                                             A.scale(z, XYc))))
            return pack(xq, yq, z, xi_q, ups_q, zeta_q)
    else:
        raise MotionError("unknown lift kind %r" % kind)
    rows = []
    for i in range(n):
        e = tuple(field.one if j == i else field.zero for j in range(n))
        rows.append(image(e))
    return [tuple(r) for r in rows]


def apply_lift(field, matrix, v):
    return normalize_point(field, pj.vec_mat(field, v, matrix))


def verify_equivariance(lift_matrix, plane_map, variety):
    """rho(g p) = lift . rho(p) as projective points, for all points."""
    field = variety.field
    for p, img in variety.rho.items():
        lhs = variety.rho[plane_map.apply_point(p)]
        rhs = apply_lift(field, lift_matrix, img)
        if lhs != rhs:
            return False, p
    return True, None


def lift_stabilizes(lift_matrix, variety):
    field = variety.field
    image = {apply_lift(field, lift_matrix, p) for p in variety.points}
    return image == set(variety.point_set)


def lift_stabilizes_points(lift_matrix, field, points):
    """Whether a set of points (e.g. the vertex space Y) is preserved."""
    pts = set(points)
    return {apply_lift(field, lift_matrix, p) for p in pts} == pts


# --------------------------------------------------------------------------
# permutation groups

def perm_mul(p, q):
    """(p*q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def group_order(generators, cap=None):
    """Order of the generated permutation group by breadth-first closure."""
    if cap is None:
        cap = int(os.environ.get(BFS_CAP_ENV, DEFAULT_BFS_CAP))
    if not generators:
        return 1
    n = len(generators[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for g in frontier:
            for h in generators:
                prod = perm_mul(g, h)
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
                    if len(seen) > cap:
                        raise MotionError(
                            "closure exceeded cap %d (partial %d)"
                            % (cap, len(seen)))
        frontier = new
    return len(seen)


def point_orbit(generators, start):
    """Orbit of a domain point under permutation generators."""
    seen = {start}
    frontier = [start]
    while frontier:
        new = []
        for x in frontier:
            for g in generators:
                if g[x] not in seen:
                    seen.add(g[x])
                    new.append(g[x])
        frontier = new
    return seen


def pair_orbit(generators, pair):
    """Orbit of an unordered point pair under permutation generators."""
    start = tuple(sorted(pair))
    seen = {start}
    frontier = [start]
    while frontier:
        new = []
        for (i, j) in frontier:
            for g in generators:
                t = tuple(sorted((g[i], g[j])))
                if t not in seen:
                    seen.add(t)
                    new.append(t)
        frontier = new
    return seen
