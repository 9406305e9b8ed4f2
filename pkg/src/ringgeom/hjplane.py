"""The ring plane G(2, A) over A = B or A = CD(B, 0), with incidence,
neighbouring, the residue epimorphism and the level-2 Hjelmslev axioms.

Points and lines carry class tags instead of homogeneous normalization;
scalar multiples are not well defined in the non-associative case.  The
three point orbits are

    P0: (x, y, 1)        x, y in A
    P1: (1, y, t z1)     y in A, z1 in B
    P2: (t x1, 1, t z1)  x1, z1 in B

and dually L0: [a, 1, c], L1: [1, t b1, c], L2: [t a1, t b1, 1].
Incidence of (x, y, z) with [a, b, c] is a*x + b*y + c*z = 0, evaluated
left to right with one algebra product per summand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebras import Algebra, is_division


class PlaneError(ValueError):
    pass


def extract_base(A):
    """(B, is_cd) where B is the maximal nondegenerate part of A.

    A must be a quadratic associative-enough division algebra B itself, or
    CD(B, 0) for such a B (recognized from the structure table: the
    second half is t*B with t = e_{base_dim} and t^2 = 0).
    """
    if A.involution is None:
        raise PlaneError("algebra has no involution")
    if A.field.is_finite and is_division(A):
        return A, False
    m = A.base_dim
    if not m or 2 * m != A.dim:
        raise PlaneError("algebra %s is not of the shape B or CD(B,0)" % A.tag)
    t = A.basis(m)
    if A.mul(t, t) != A.zero():
        raise PlaneError("algebra %s is not CD(B,0): t^2 != 0" % A.tag)
    # carve out B from the upper-left block of the table
    zero_tail = (A.field.zero,) * m
    table = []
    inv_rows = []
    for i in range(m):
        row = []
        for j in range(m):
            prod = A.table[i][j]
            if prod[m:] != zero_tail:
                raise PlaneError("B-part of %s is not closed" % A.tag)
            row.append(prod[:m])
        table.append(tuple(row))
        ci = A.involution[i]
        if ci[m:] != zero_tail:
            raise PlaneError("involution does not stabilize the B-part")
        inv_rows.append(ci[:m])
    B = Algebra(A.field, m, tuple(table), tuple(inv_rows),
                tag="base(%s)" % A.tag, base_dim=m)
    if A.field.is_finite and not is_division(B):
        raise PlaneError("base of %s is not a division algebra" % A.tag)
    return B, True


@dataclass
class IncidenceStructure:
    algebra: Algebra
    base: Algebra
    is_cd: bool
    points: list
    lines: list
    points_on: list      # per line index: list of point indices
    lines_through: list  # per point index
    point_index: dict
    line_index: dict

    def incident(self, p, l):
        return incidence_value(self.algebra, p, l) == self.algebra.zero()

    def point_neighbouring(self, p, q):
        return tilde_triple(self.algebra, self.base, p) == \
            tilde_triple(self.algebra, self.base, q)

    def line_neighbouring(self, l, m):
        return tilde_triple(self.algebra, self.base, l) == \
            tilde_triple(self.algebra, self.base, m)

    def point_line_neighbouring(self, p, l):
        v = incidence_value(self.algebra, p, l)
        return all(x == self.algebra.field.zero
                   for x in self.algebra.b_part(v))

    def n_points(self):
        return len(self.points)


def incidence_value(A, point, line):
    _, _, x, y, z = point
    _, _, a, b, c = line
    return A.add(A.add(A.mul(a, x), A.mul(b, y)), A.mul(c, z))


def tilde_triple(A, B, obj):
    _, _, u, v, w = obj
    if not A.base_dim or A.dim == B.dim:
        return (u, v, w)
    return (A.b_part(u), A.b_part(v), A.b_part(w))


def _b_elements(B):
    return B.elements()


def build_plane(A):
    """Enumerate G(2, A) with constructive per-line point lists."""
    B, is_cd = extract_base(A)
    one, zero = A.one(), A.zero()
    a_elems = A.elements()
    if is_cd:
        b_elems = _b_elements(B)
        t_of = A.t_times
    else:
        b_elems = [B.zero()]
        t_of = lambda b: zero

    points = []
    for x in a_elems:
        for y in a_elems:
            points.append(("P", 0, x, y, one))
    for y in a_elems:
        for z1 in b_elems:
            points.append(("P", 1, one, y, t_of(z1)))
    for x1 in b_elems:
        for z1 in b_elems:
            points.append(("P", 2, t_of(x1), one, t_of(z1)))

    lines = []
    for a in a_elems:
        for c in a_elems:
            lines.append(("L", 0, a, one, c))
    for b1 in b_elems:
        for c in a_elems:
            lines.append(("L", 1, one, t_of(b1), c))
    for a1 in b_elems:
        for b1 in b_elems:
            lines.append(("L", 2, t_of(a1), t_of(b1), one))

    point_index = {p: i for i, p in enumerate(points)}
    line_index = {l: i for i, l in enumerate(lines)}
    if len(point_index) != len(points) or len(line_index) != len(lines):
        raise PlaneError("template enumeration produced duplicates")

    points_on = [line_point_list(A, B, is_cd, l, point_index)
                 for l in lines]
    lines_through = [[] for _ in points]
    for li, pts in enumerate(points_on):
        for pi in pts:
            lines_through[pi].append(li)
    return IncidenceStructure(A, B, is_cd, points, lines, points_on,
                              lines_through, point_index, line_index)


def line_point_list(A, B, is_cd, line, point_index):
    """Solve a*x + b*y + c*z = 0 template by template."""
    one, zero = A.one(), A.zero()
    b_elems = _b_elements(B) if is_cd else [B.zero()]
    t_of = A.t_times if is_cd else (lambda b: zero)
    _, tag, a, b, c = line
    out = []

    def emit(p):
        out.append(point_index[p])

    if tag == 0:
        # [a,1,c]: affine points with free x; mid points with free z1
        for x in A.elements():
            y = A.neg(A.add(A.mul(a, x), c))
            emit(("P", 0, x, y, one))
        for z1 in b_elems:
            tz = t_of(z1)
            y = A.neg(A.add(a, A.mul(c, tz)))
            emit(("P", 1, one, y, tz))
    elif tag == 1:
        # [1, tb1, c]: affine points with free y; deep points with free z1
        for y in A.elements():
            x = A.neg(A.add(A.mul(b, y), c))
            emit(("P", 0, x, y, one))
        for z1 in b_elems:
            tz = t_of(z1)
            v = A.add(b, A.mul(c, tz))
            emit(("P", 2, A.neg(v), one, tz))
    else:
        # [ta1, tb1, 1]: mid points with free y; deep points with free x1
        for y in A.elements():
            tz = A.neg(A.add(a, A.mul(b, y)))
            emit(("P", 1, one, y, tz))
        for x1 in b_elems:
            tx = t_of(x1)
            emit(("P", 2, tx, one, A.neg(b)))
    return out


def expected_point_count(A, B, is_cd=True):
    na = A.size()
    nb = B.size() if is_cd else 1     # size of tB
    return na * na + na * nb + nb * nb


def epimorphism_to_residue(plane):
    """Tilde map onto G(2, B) = PG(2, B); fibers are the neighbour classes."""
    if not plane.is_cd:
        raise PlaneError("plane is already over a division algebra")
    A, B = plane.algebra, plane.base
    residue = build_plane(B)
    zero_b = B.zero()
    one_b = B.one()

    def tilde_point(p):
        _, tag, x, y, z = p
        if tag == 0:
            return ("P", 0, A.b_part(x), A.b_part(y), one_b)
        if tag == 1:
            return ("P", 1, one_b, A.b_part(y), zero_b)
        return ("P", 2, zero_b, one_b, zero_b)

    def tilde_line(l):
        _, tag, a, b, c = l
        if tag == 0:
            return ("L", 0, A.b_part(a), one_b, A.b_part(c))
        if tag == 1:
            return ("L", 1, one_b, zero_b, A.b_part(c))
        return ("L", 2, zero_b, zero_b, one_b)

    point_map = {p: tilde_point(p) for p in plane.points}
    line_map = {l: tilde_line(l) for l in plane.lines}
    for p, img in point_map.items():
        if img not in residue.point_index:
            raise PlaneError("tilde image %r is not a residue point" % (img,))
    for l, img in line_map.items():
        if img not in residue.line_index:
            raise PlaneError("tilde image %r is not a residue line" % (img,))
    return point_map, line_map, residue


def is_affine_plane(points, line_sets, order):
    """Axiomatic affine-plane check on an abstract incidence structure."""
    n = order
    points = list(points)
    lines = [frozenset(l) for l in line_sets]
    if len(points) != n * n or len(set(lines)) != len(lines):
        return False
    if len(lines) != n * n + n:
        return False
    if any(len(l) != n for l in lines):
        return False
    for p, q in itertools.combinations(points, 2):
        joins = [l for l in lines if p in l and q in l]
        if len(joins) != 1:
            return False
    # Playfair: unique parallel through an external point
    for l in lines:
        for p in points:
            if p in l:
                continue
            par = [m for m in lines if p in m and not (m & l)]
            if len(par) != 1:
                return False
    return True


def verify_hjelmslev_level2(plane):
    """Check (Hj1)-(Hj4); returns a dict report with any violations."""
    A, B = plane.algebra, plane.base
    n = B.size()
    report = {"order": n, "violations": [], "hj1": True, "hj2": True,
              "hj3": True, "hj4": True}
    npts = len(plane.points)
    lines_through = [set(ls) for ls in plane.lines_through]
    points_on = [set(ps) for ps in plane.points_on]

    for i, j in itertools.combinations(range(npts), 2):
        common = lines_through[i] & lines_through[j]
        nb = plane.point_neighbouring(plane.points[i], plane.points[j])
        if not common or ((len(common) == 1) != (not nb)):
            report["hj1"] = False
            report["violations"].append(("Hj1", i, j, len(common), nb))
    for i, j in itertools.combinations(range(len(plane.lines)), 2):
        common = points_on[i] & points_on[j]
        nb = plane.line_neighbouring(plane.lines[i], plane.lines[j])
        if not common or ((len(common) == 1) != (not nb)):
            report["hj2"] = False
            report["violations"].append(("Hj2", i, j, len(common), nb))

    # (Hj3): point neighbour classes with induced line traces
    classes = {}
    for i, p in enumerate(plane.points):
        classes.setdefault(tilde_triple(A, B, p), []).append(i)
    for key, cls in classes.items():
        cset = set(cls)
        traces = set()
        for ps in points_on:
            tr = ps & cset
            if len(tr) >= 2:
                traces.add(frozenset(tr))
        if plane.is_cd:
            if not is_affine_plane(cls, traces, n):
                report["hj3"] = False
                report["violations"].append(("Hj3", key))
        else:
            if len(cls) != 1 or traces:
                report["hj3"] = False
                report["violations"].append(("Hj3", key))

    # (Hj4): dual, on line neighbour classes
    lclasses = {}
    for i, l in enumerate(plane.lines):
        lclasses.setdefault(tilde_triple(A, B, l), []).append(i)
    for key, cls in lclasses.items():
        cset = set(cls)
        traces = set()
        for ls in lines_through:
            tr = ls & cset
            if len(tr) >= 2:
                traces.add(frozenset(tr))
        if plane.is_cd:
            if not is_affine_plane(cls, traces, n):
                report["hj4"] = False
                report["violations"].append(("Hj4", key))
        else:
            if len(cls) != 1 or traces:
                report["hj4"] = False
                report["violations"].append(("Hj4", key))

    report["ok"] = all(report[k] for k in ("hj1", "hj2", "hj3", "hj4"))
    return report


def nonneighbouring_point_line_consistency(plane):
    """A point P and line L are non-neighbouring iff P is non-neighbouring
    with every point on L."""
    for li, l in enumerate(plane.lines):
        on = [plane.points[i] for i in plane.points_on[li]]
        for p in plane.points:
            direct = not plane.point_line_neighbouring(p, l)
            via_points = all(not plane.point_neighbouring(p, q) for q in on)
            if direct != via_points:
                return False, (p, l)
    return True, None
