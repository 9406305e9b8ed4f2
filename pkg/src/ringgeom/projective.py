"""Exact linear algebra and quadric machinery in PG(N, K).

Vectors are tuples of field elements; projective points are normalized
so that the first nonzero coordinate is 1.  Subspaces are stored as
canonical reduced row echelon bases, which makes subspace equality a
plain data comparison.

Quadratic forms are kept as upper-triangular coefficient tables and
never as symmetric Gram matrices: in characteristic 2 the associated
bilinear form is alternating and does not determine the form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

INF = "inf"  # cross-ratio value for a vanishing denominator


class GeometryError(ValueError):
    pass


class QuadricFitError(GeometryError):
    def __init__(self, nullity):
        super().__init__("no unique quadric: solution space has dimension %d"
                         % nullity)
        self.nullity = nullity


# --------------------------------------------------------------------------
# vectors and matrices

def vec_add(field, u, v):
    add = field.add
    return tuple(add(a, b) for a, b in zip(u, v))


def vec_sub(field, u, v):
    sub = field.sub
    return tuple(sub(a, b) for a, b in zip(u, v))


def vec_scale(field, c, u):
    mul = field.mul
    return tuple(mul(c, a) for a in u)


def is_zero_vec(field, u):
    z = field.zero
    return all(a == z for a in u)


def normalize_point(field, v):
    """Scale so the first nonzero coordinate is 1; None for the zero vector."""
    z = field.zero
    for a in v:
        if a != z:
            if a == field.one:
                return tuple(v)
            c = field.inv(a)
            return tuple(field.mul(c, x) for x in v)
    return None


def rref(field, rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    z = field.zero
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c] != z:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = field.inv(mat[r][c])
        if mat[r][c] != field.one:
            mat[r] = [field.mul(inv, x) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != z:
                f = mat[i][c]
                mat[i] = [field.sub(x, field.mul(f, y))
                          for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def nullspace(field, rows, ncols):
    """Basis of the right kernel of the matrix with the given rows."""
    red, pivots = rref(field, rows)
    z, one = field.zero, field.one
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [z] * ncols
        v[fc] = one
        for r, pc in zip(red, pivots):
            v[pc] = field.neg(r[fc])
        basis.append(tuple(v))
    return basis


def solve(field, rows, rhs):
    """One solution x of rows^T-system sum_i x_i rows[i][j] = rhs[j], or None."""
    ncols = len(rows)
    aug = []
    nc = len(rhs)
    for j in range(nc):
        aug.append(tuple(rows[i][j] for i in range(ncols)) + (rhs[j],))
    red, pivots = rref(field, aug)
    z = field.zero
    x = [z] * ncols
    for r, pc in zip(red, pivots):
        if pc == ncols:
            return None
        x[pc] = r[ncols]
    # consistency
    for j in range(nc):
        acc = z
        for i in range(ncols):
            acc = field.add(acc, field.mul(x[i], rows[i][j]))
        if acc != rhs[j]:
            return None
    return tuple(x)


def mat_inverse(field, rows):
    n = len(rows)
    aug = [tuple(rows[i]) + tuple(field.one if j == i else field.zero
                                  for j in range(n)) for i in range(n)]
    red, pivots = rref(field, aug)
    if pivots[:n] != list(range(n)):
        raise GeometryError("matrix not invertible")
    return [r[n:] for r in red]


def mat_vec(field, rows, v):
    add, mul, z = field.add, field.mul, field.zero
    out = []
    for row in rows:
        acc = z
        for a, b in zip(row, v):
            if a != z and b != z:
                acc = add(acc, mul(a, b))
        out.append(acc)
    return tuple(out)


def vec_mat(field, v, rows):
    add, mul, z = field.add, field.mul, field.zero
    ncols = len(rows[0])
    out = [z] * ncols
    for c, row in zip(v, rows):
        if c != z:
            for j, a in enumerate(row):
                if a != z:
                    out[j] = add(out[j], mul(c, a))
    return tuple(out)


# --------------------------------------------------------------------------
# subspaces

@dataclass(frozen=True)
class Subspace:
    """Row-reduced echelon basis of a linear subspace of K^n."""
    field: object
    n: int
    rows: tuple

    @property
    def pdim(self):
        """Projective dimension (-1 for the empty subspace)."""
        return len(self.rows) - 1

    @property
    def vdim(self):
        return len(self.rows)

    def contains(self, v):
        return is_zero_vec(self.field, self.reduce(v))

    def reduce(self, v):
        """Residual of v after elimination against the echelon rows."""
        field = self.field
        v = list(v)
        z = field.zero
        for row in self.rows:
            pc = next(i for i, a in enumerate(row) if a != z)
            if v[pc] != z:
                f = v[pc]
                for j in range(pc, self.n):
                    v[j] = field.sub(v[j], field.mul(f, row[j]))
        return tuple(v)

    def points(self):
        """All projective points, normalized (finite fields only)."""
        field = self.field
        if not self.rows:
            return []
        out = []
        for coeffs in pg_parameters(field, len(self.rows)):
            out.append(vec_mat(field, coeffs, self.rows))
        return out

    def __le__(self, other):
        return all(other.contains(r) for r in self.rows)


def pg_parameters(field, k):
    """Normalized coefficient tuples: first nonzero entry is 1."""
    elems = list(field.elements())
    z, one = field.zero, field.one
    for lead in range(k):
        prefix = (z,) * lead + (one,)
        for tail in itertools.product(elems, repeat=k - lead - 1):
            yield prefix + tail


def pg_points(field, n):
    """All points of PG(n-1 projective, i.e. of K^n), normalized."""
    return [p for p in pg_parameters(field, n)]


def span(field, vectors, n=None):
    vectors = [tuple(v) for v in vectors]
    if n is None:
        if not vectors:
            raise GeometryError("cannot infer ambient dimension of empty span")
        n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise GeometryError("ambient dimension mismatch")
    rows, _ = rref(field, vectors)
    return Subspace(field, n, tuple(rows))


def span_subspaces(field, subspaces):
    rows = []
    n = subspaces[0].n
    for s in subspaces:
        if s.n != n:
            raise GeometryError("ambient dimension mismatch")
        rows.extend(s.rows)
    return span(field, rows, n)


def meet(s1, s2):
    """Intersection of two subspaces (Zassenhaus)."""
    if s1.n != s2.n or s1.field != s2.field:
        raise GeometryError("ambient mismatch in meet")
    field, n = s1.field, s1.n
    z = field.zero
    zrow = (z,) * n
    big = [tuple(r) + tuple(r) for r in s1.rows] + \
          [tuple(r) + zrow for r in s2.rows]
    red, _ = rref(field, big)
    inter = []
    for row in red:
        if all(a == z for a in row[:n]):
            right = row[n:]
            if not is_zero_vec(field, right):
                inter.append(right)
    out, _ = rref(field, inter)
    return Subspace(field, n, tuple(out))


def complement(s, within=None):
    """Canonical coordinate complement: greedy extension by standard basis."""
    field, n = s.field, s.n
    rows = list(s.rows)
    base = list(within.rows) if within is not None else None
    comp = []
    candidates = base if base is not None else \
        [tuple(field.one if j == i else field.zero for j in range(n))
         for i in range(n)]
    target = (within.vdim if within is not None else n)
    for e in candidates:
        test, _ = rref(field, rows + comp + [e])
        if len(test) > len(rows) + len(comp):
            comp.append(e)
        if len(rows) + len(comp) == target:
            break
    if len(rows) + len(comp) != target:
        raise GeometryError("complement construction failed")
    out, _ = rref(field, comp)
    return Subspace(field, n, tuple(out))


class Projection:
    """Linear projection of K^n from `kernel` onto `target` (complementary)."""

    def __init__(self, kernel, target):
        field = kernel.field
        if target.field != field or target.n != kernel.n:
            raise GeometryError("ambient mismatch")
        n = kernel.n
        if kernel.vdim + target.vdim != n:
            raise GeometryError("kernel and target are not complementary")
        basis = list(kernel.rows) + list(target.rows)
        self.field = field
        self.n = n
        self.kernel = kernel
        self.target = target
        self._k = kernel.vdim
        # v = x . basis  =>  x = v . basis^{-1}  (row-vector convention)
        self._binv = mat_inverse(field, [list(r) for r in zip(*basis)])

    def coords(self, v):
        """Target-basis coordinates of the image (None if v in kernel)."""
        x = mat_vec(self.field, self._binv, v)
        beta = x[self._k:]
        if is_zero_vec(self.field, beta):
            return None
        return beta

    def apply(self, v, normalize=True):
        """Image of v inside the ambient space, as a point of `target`."""
        beta = self.coords(v)
        if beta is None:
            return None
        img = vec_mat(self.field, beta, self.target.rows)
        return normalize_point(self.field, img) if normalize else img


def intrinsic_coords(subspace, v):
    """Coordinates of v w.r.t. the echelon rows (reads off pivot columns)."""
    field = subspace.field
    z = field.zero
    coeffs = []
    for row in subspace.rows:
        pc = next(i for i, a in enumerate(row) if a != z)
        coeffs.append(v[pc])
    # verify membership
    acc = vec_mat(field, tuple(coeffs), subspace.rows) if coeffs else None
    if acc is None or acc != tuple(v):
        red = subspace.reduce(v)
        if not is_zero_vec(field, red):
            raise GeometryError("vector not in subspace")
        # coordinates w.r.t. RREF rows are exactly the pivot entries,
        # so reaching this branch would mean a broken basis
        raise GeometryError("intrinsic coordinate extraction failed")
    return tuple(coeffs)


def from_intrinsic(subspace, coeffs):
    return vec_mat(subspace.field, tuple(coeffs), subspace.rows)


def line_points(field, u, v):
    """All points of the projective line through distinct points u, v."""
    pts = [tuple(u)]
    for lam in field.elements():
        w = vec_add(field, vec_scale(field, lam, u), v)
        pts.append(normalize_point(field, w))
    return pts


def third_points(field, u, v):
    """Points of the line <u, v> other than u and v."""
    out = []
    for lam in field.elements():
        if lam == field.zero:
            w = v
        else:
            w = vec_add(field, vec_scale(field, lam, u), v)
            w = normalize_point(field, w)
        if w != tuple(u) and w != tuple(v):
            out.append(w)
    return out


# --------------------------------------------------------------------------
# quadratic forms

@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = sum_{i<=j} coeff[(i,j)] x_i x_j over K^n."""
    field: object
    n: int
    coeffs: tuple   # flat tuple in monomial_order(n) ordering

    def coeff(self, i, j):
        return self.coeffs[_mono_index(self.n, i, j)]

    def evaluate(self, v):
        field = self.field
        add, mul, z = field.add, field.mul, field.zero
        acc = z
        idx = 0
        for i in range(self.n):
            vi = v[i]
            for j in range(i, self.n):
                c = self.coeffs[idx]
                idx += 1
                if c != z and vi != z and v[j] != z:
                    acc = add(acc, mul(c, mul(vi, v[j])))
        return acc

    def bilinear(self, u, v):
        """b(u, v) = Q(u+v) - Q(u) - Q(v)."""
        field = self.field
        s = vec_add(field, u, v)
        return field.sub(field.sub(self.evaluate(s), self.evaluate(u)),
                         self.evaluate(v))

    def gram_rows(self):
        field = self.field
        basis = [tuple(field.one if j == i else field.zero for j in range(self.n))
                 for i in range(self.n)]
        return [tuple(self.bilinear(basis[i], basis[j]) for j in range(self.n))
                for i in range(self.n)]


def monomial_order(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _mono_index(n, i, j):
    # index of (i, j), i <= j, in monomial_order(n)
    return i * n - i * (i - 1) // 2 + (j - i)


def quadratic_form(field, n, coeff_map):
    order = monomial_order(n)
    flat = [field.zero] * len(order)
    for (i, j), c in coeff_map.items():
        if i > j:
            i, j = j, i
        flat[_mono_index(n, i, j)] = c
    return QuadraticForm(field, n, tuple(flat))


def fit_quadric(field, points, n):
    """The unique (up to scalar) quadric through the points, or raise.

    Solves the homogeneous system Q(p) = 0 over the monomial coefficients
    and scales the solution so its first nonzero coefficient is 1.
    """
    order = monomial_order(n)
    rows = []
    for p in points:
        rows.append(tuple(field.mul(p[i], p[j]) for (i, j) in order))
    ker = nullspace(field, rows, len(order))
    if len(ker) != 1:
        raise QuadricFitError(len(ker))
    coeffs = normalize_point(field, ker[0])
    return QuadraticForm(field, n, coeffs)


def quadric_zero_set(qf, points=None):
    field = qf.field
    if points is None:
        points = pg_points(field, qf.n)
    z = field.zero
    return [p for p in points if qf.evaluate(p) == z]


def forms_through(field, points, n):
    """Basis of the space of quadratic forms vanishing on the points."""
    order = monomial_order(n)
    rows = [tuple(field.mul(p[i], p[j]) for (i, j) in order) for p in points]
    return nullspace(field, rows, len(order))


def exact_zero_set_forms(field, points, n, witt=None):
    """All forms (up to scalar) whose zero set is exactly the given point
    set; for small fields the solution pencil is enumerated when the
    linear fit alone is underdetermined (e.g. 4 conic points at q = 3)."""
    ker = forms_through(field, points, n)
    if not ker:
        return []
    target = set(tuple(p) for p in points)
    ambient = pg_points(field, n)
    out = []
    for coeffs in pg_parameters(field, len(ker)):
        flat = vec_mat(field, coeffs, ker)
        qf = QuadraticForm(field, n, normalize_point(field, flat))
        if set(quadric_zero_set(qf, ambient)) != target:
            continue
        if witt is not None and witt_index(qf) != witt:
            continue
        out.append(qf)
    return out


def quadric_vertex(qf):
    """Vertex {v : Q(v)=0 and b(v,.)==0} as a Subspace (char-2 correct)."""
    field = qf.field
    rad = nullspace(field, qf.gram_rows(), qf.n)
    radspace = span(field, rad, qf.n) if rad else Subspace(field, qf.n, ())
    if field.p != 2:
        # char != 2: Q vanishes on the radical automatically only when
        # 2 is invertible and b determines Q; filter anyway for safety
        rows = [r for r in radspace.rows if qf.evaluate(r) == field.zero]
        if len(rows) == len(radspace.rows):
            return radspace
        if not field.is_finite:
            kept, _ = rref(field, rows)
            return Subspace(field, qf.n, tuple(kept))
    if not radspace.rows:
        return radspace
    zero_pts = [p for p in radspace.points() if qf.evaluate(p) == field.zero]
    if not zero_pts:
        return Subspace(field, qf.n, ())
    vert = span(field, zero_pts, qf.n)
    # Q must vanish on the whole span for the vertex to be a subspace
    for p in vert.points():
        if qf.evaluate(p) != field.zero:
            raise GeometryError("singular zero locus is not a subspace")
    return vert


def witt_index(qf, within_points=None):
    """1 + max projective dimension of a totally singular subspace.

    Exhaustive greedy search over the zero set; only for finite fields
    and the small ambients used here.
    """
    field = qf.field
    zeros = quadric_zero_set(qf, within_points)
    if not zeros:
        return 0
    z = field.zero
    best = [0]

    def extend(basis, sub, candidates):
        best[0] = max(best[0], len(basis))
        for idx, p in enumerate(candidates):
            if not all(qf.bilinear(b, p) == z for b in basis):
                continue
            if sub is not None and sub.contains(p):
                continue
            rest = []
            for quad in candidates[idx + 1:]:
                if qf.bilinear(p, quad) == z:
                    rest.append(quad)
            nxt = span(field, basis + [p], qf.n)
            extend(basis + [p], nxt, rest)

    extend([], None, zeros)
    return best[0]


# --------------------------------------------------------------------------
# ovoids and tangent hyperplanes

def tangent_points_at(field, pointset, x, ambient_points):
    """Union of tangent lines to `pointset` through x, within the ambient.

    Returns (tangent_union, ok) where ok is False if some line through x
    carries three or more points of the set.
    """
    tangent = {tuple(x)}
    ok = True
    seen = set()
    for y in ambient_points:
        y = tuple(y)
        if y == tuple(x) or y in seen:
            continue
        lp = line_points(field, x, y)
        for p in lp:
            seen.add(p)
        hits = [p for p in lp if p in pointset]
        if len(hits) == 1:
            tangent.update(lp)
        elif len(hits) > 2:
            ok = False
    return tangent, ok


def is_ovoid(field, points, within):
    """Definition check: spans `within`, no 3 collinear, tangent sets are
    hyperplanes and every non-tangent line through a point is a secant."""
    pts = [intrinsic_coords(within, p) for p in points]
    k = within.vdim
    if len(pts) != len(set(pts)):
        return False
    sp, _ = rref(field, pts)
    if len(sp) != k:
        return False
    pointset = set(pts)
    ambient = pg_points(field, k)
    for x in pts:
        tangent, ok = tangent_points_at(field, pointset, x, ambient)
        if not ok:
            return False
        tsp, _ = rref(field, sorted(tangent))
        if len(tsp) != k - 1:
            return False
        hyper = Subspace(field, k, tuple(tsp))
        if not all(hyper.contains(t) for t in tangent):
            return False
    return True


def ovoid_tangent_hyperplane(field, points, within, x):
    """Tangent hyperplane at x of an ovoid or cone point set, in ambient
    coordinates.  A tangent line has one or all of its points in the set
    (the latter happens along the generators of a cone)."""
    pts = {intrinsic_coords(within, p) for p in points}
    xi = intrinsic_coords(within, x)
    tangent = {xi}
    seen = set()
    for y in pg_points(field, within.vdim):
        if y == xi or y in seen:
            continue
        lp = line_points(field, xi, y)
        seen.update(lp)
        hits = sum(1 for p in lp if p in pts)
        if hits == 1 or hits == len(lp):
            tangent.update(lp)
        elif hits != 2:
            raise GeometryError("line meets the set in %d points" % hits)
    rows, _ = rref(field, sorted(tangent))
    return span(field, [from_intrinsic(within, r) for r in rows], within.n)


# --------------------------------------------------------------------------
# cross-ratio

def conic_sections(field, pts, sub):
    """Plane sections with q+1 points of a quadric point set spanning
    `sub`; the set itself when it already spans a plane."""
    if sub.pdim == 2:
        return [tuple(sorted(pts))]
    out = set()
    for trio in itertools.combinations(sorted(pts), 3):
        pl = span(field, list(trio), sub.n)
        if pl.vdim != 3:
            continue
        sect = tuple(sorted(p for p in pts if pl.contains(p)))
        if len(sect) == field.q + 1:
            out.add(sect)
    return sorted(out)


def point_to_json(field, p):
    from .fields import scalar_to_json
    return [scalar_to_json(field, c) for c in p]


def point_from_json(field, data):
    from .fields import scalar_from_json
    return tuple(scalar_from_json(field, c) for c in data)


def subspace_to_json(s):
    return [point_to_json(s.field, r) for r in s.rows]


def subspace_from_json(field, n, data):
    return Subspace(field, n, tuple(point_from_json(field, r)
                                    for r in data))


def quadric_to_json(qf):
    from .fields import scalar_to_json
    out = {}
    for (i, j), c in zip(monomial_order(qf.n), qf.coeffs):
        if c != qf.field.zero:
            out["%d,%d" % (i, j)] = scalar_to_json(qf.field, c)
    return out


def quadric_from_json(field, n, data):
    from .fields import scalar_from_json
    coeffs = {}
    for key, c in data.items():
        i, j = key.split(",")
        coeffs[(int(i), int(j))] = scalar_from_json(field, c)
    return quadratic_form(field, n, coeffs)


def _line_coords(field, basis_u, basis_v, p):
    sol = solve(field, [tuple(basis_u), tuple(basis_v)], tuple(p))
    if sol is None:
        raise GeometryError("points not collinear")
    return sol


def cross_ratio(field, p1, p2, p3, p4):
    """Cross-ratio ((l1-l3)(l2-l4)) / ((l1-l4)(l2-l3)), INF for zero
    denominator.  Requires four collinear points, at least three distinct."""
    pts = [tuple(normalize_point(field, p)) for p in (p1, p2, p3, p4)]
    if len(set(pts)) < 3:
        raise GeometryError("need at least three distinct points")
    distinct = []
    for p in pts:
        if p not in distinct:
            distinct.append(p)
    u, v = distinct[0], distinct[1]
    sp, _ = rref(field, list(pts))
    if len(sp) != 2:
        raise GeometryError("points not collinear")
    cs = [_line_coords(field, u, v, p) for p in pts]

    def det(a, b):
        return field.sub(field.mul(cs[a][0], cs[b][1]),
                         field.mul(cs[b][0], cs[a][1]))

    num = field.mul(det(0, 2), det(1, 3))
    den = field.mul(det(0, 3), det(1, 2))
    if den == field.zero:
        return INF
    return field.div(num, den)


def conic_cross_ratio(field, plane, conic_pts, quad, qf=None):
    """Cross-ratio of four points of a conic, via projection from a conic
    point onto an auxiliary line of the plane.

    `plane` is the Subspace spanned by the conic, `conic_pts` its full
    point set and `quad` the ordered quadruple.  If the projection centre
    has to be one of the quadruple (q = 3), its image is cut out by the
    tangent line, which needs the fitted form `qf` (in plane coordinates).
    """
    pts = [intrinsic_coords(plane, p) for p in conic_pts]
    quad_i = [intrinsic_coords(plane, p) for p in quad]
    centre = None
    for p in pts:
        if p not in quad_i:
            centre = p
            break
    if centre is None:
        centre = quad_i[0]
    # auxiliary line through two conic points distinct from the centre
    aux = [p for p in pts if p != centre][:2]
    aux_line = span(field, aux, 3)
    images = []
    for p in quad_i:
        if p == centre:
            if qf is None:
                forms = exact_zero_set_forms(field, pts, 3)
                if not forms:
                    raise GeometryError("no conic through the points")
                qf = forms[0]
            # tangent line at the centre: kernel of b(centre, .)
            row = tuple(qf.bilinear(centre,
                                    tuple(field.one if j == i else field.zero
                                          for j in range(3)))
                        for i in range(3))
            tline = span(field, nullspace(field, [row], 3), 3)
            img = meet(tline, aux_line)
        else:
            img = meet(span(field, [centre, p], 3), aux_line)
        if img.vdim != 1:
            raise GeometryError("conic projection degenerated")
        images.append(img.rows[0])
    return cross_ratio(field, *images)
