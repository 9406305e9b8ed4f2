"""Normal rational curves, cubic scrolls, regular spreads and reguli,
and regular d-scrolls with their quadric families.

Projectivities between a quadric and a spread are stored extensionally
as pairing lists together with a cross-ratio certifier; the geometric
constructions compose them through projections where no single matrix is
canonical.  All searches are exhaustive with rank pruning (q <= 5).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fields import GF, subfield_embedding, FieldError
from . import projective as pj
from .projective import (Subspace, span, meet, rref, normalize_point,
                         GeometryError, intrinsic_coords, cross_ratio)


def normal_rational_curve(field, m):
    """{(x0^m, x0^{m-1} x1, ..., x1^m)} in K^{m+1}; q+1 points."""
    pts = []
    for x0, x1 in [(field.one, t) for t in field.elements()] + \
                  [(field.zero, field.one)]:
        coords = []
        for i in range(m + 1):
            coords.append(field.mul(field.pow(x0, m - i), field.pow(x1, i)))
        pts.append(normalize_point(field, tuple(coords)))
    return pts


# --------------------------------------------------------------------------
# spreads and reguli

@dataclass
class Spread:
    field: object
    n: int                # ambient vector dimension
    members: tuple        # Subspaces, pairwise disjoint, covering PG(n-1)

    def member_through(self, p):
        for m in self.members:
            if m.contains(p):
                return m
        return None


def vector_space_view(L, K):
    """A K-basis of L and the coordinate map L -> K^e, via exhaustive
    combination tables (fields are tiny here)."""
    if L.p != K.p or L.k % K.k != 0:
        raise FieldError("no reduction of %r over %r" % (L, K))
    e = L.k // K.k
    emb = subfield_embedding(K, L)
    basis = [L.one]
    for cand in L.elements():
        if len(basis) == e:
            break
        trial = basis + [cand]
        spanned = set()
        for combo in itertools.product(K.elements(), repeat=len(trial)):
            acc = L.zero
            for c, b in zip(combo, trial):
                acc = L.add(acc, L.mul(emb[c], b))
            spanned.add(acc)
        if len(spanned) == K.q ** len(trial):
            basis = trial
    if len(basis) != e:
        raise FieldError("basis construction failed")
    coords = {}
    for combo in itertools.product(K.elements(), repeat=e):
        acc = L.zero
        for c, b in zip(combo, basis):
            acc = L.add(acc, L.mul(emb[c], b))
        coords[acc] = tuple(combo)
    return emb, basis, coords


def regular_spread(d, q, m=2):
    """(d-1)-spread of PG(m*d - 1, q) by field reduction of PG(m-1, q^d)."""
    K = GF(q)
    if d == 1:
        members = tuple(Subspace(K, m, (p,)) for p in pj.pg_points(K, m))
        return Spread(K, m, members)
    L = GF(K.p ** (K.k * d))
    emb, basis, coords = vector_space_view(L, K)
    members = []
    for lpoint in pj.pg_points(L, m):
        rows = []
        for lam in basis:
            vec = []
            for comp in lpoint:
                vec.extend(coords[L.mul(lam, comp)])
            rows.append(tuple(vec))
        members.append(span(K, rows, m * d))
    return Spread(K, m * d, tuple(members))


def spread_from_subspaces(field, members, n):
    return Spread(field, n, tuple(members))


def transversals_of_triple(s1, s2, s3):
    """Common transversal lines of three pairwise disjoint (e-1)-spaces
    spanning a (2e-1)-space; one through each point of s1."""
    field = s1.field
    out = []
    for p in s1.points():
        u2 = span(field, list(s2.rows) + [p], s1.n)
        u3 = span(field, list(s3.rows) + [p], s1.n)
        t = meet(u2, u3)
        if t.vdim != 2:
            raise GeometryError("triple admits no transversal through %r" % (p,))
        for s in (s1, s2, s3):
            if meet(t, s).vdim != 1:
                raise GeometryError("transversal misses a member")
        out.append(t)
    return out


def regulus(s1, s2, s3):
    """The regulus through three pairwise disjoint lines of a PG(3, q):
    all lines meeting every common transversal."""
    field = s1.field
    for a, b in itertools.combinations((s1, s2, s3), 2):
        if meet(a, b).rows:
            raise GeometryError("regulus inputs are not pairwise disjoint")
    if s1.vdim != 2:
        raise GeometryError("regulus implemented for line spreads only")
    ts = transversals_of_triple(s1, s2, s3)
    t0, t1, t2 = ts[0], ts[1], ts[2]
    members = []
    for x in t0.points():
        u1 = span(field, list(t1.rows) + [x], s1.n)
        u2 = span(field, list(t2.rows) + [x], s1.n)
        m = meet(u1, u2)
        if m.vdim != 2:
            raise GeometryError("regulus reconstruction failed")
        if all(meet(m, t).vdim == 1 for t in ts):
            members.append(m)
    if len(members) != field.q + 1:
        raise GeometryError("regulus has %d != q+1 members" % len(members))
    return members


def is_regular_spread(spread, within=None):
    """Regulus closure.  Point spreads are trivially regular; line spreads
    are checked classically; spreads in larger ambients are checked on the
    subspaces spanned by pairs of members (the induced spreads there must
    exist and be regular).  `within` restricts the covering condition to a
    subspace (e.g. the vertex space of a variety)."""
    members = list(spread.members)
    if not members:
        return False
    e = members[0].vdim
    field = spread.field
    covered = set()
    for m in members:
        pts = set(m.points())
        if pts & covered:
            return False
        covered |= pts
    target = set(within.points()) if within is not None else \
        set(pj.pg_points(field, spread.n))
    if covered != target:
        return False
    if e == 1:
        return True
    if e != 2:
        raise GeometryError("regularity check implemented for e <= 2")
    member_rows = {m.rows for m in members}
    pair_spans = {}
    for a, b in itertools.combinations(members, 2):
        u = span(field, list(a.rows) + list(b.rows), spread.n)
        pair_spans.setdefault(u.rows, u)
    for u in pair_spans.values():
        inside = []
        for m in members:
            mm = meet(m, u)
            if mm.vdim == 0:
                continue
            if mm.vdim != m.vdim:
                return False     # member meets the 3-space partially
            inside.append(m)
        cov = set()
        for m in inside:
            cov |= set(m.points())
        if cov != set(u.points()):
            return False
        for trio in itertools.combinations(inside, 3):
            for r in regulus(*trio):
                if r.rows not in member_rows:
                    return False
    return True


# --------------------------------------------------------------------------
# scrolls

@dataclass
class Scroll:
    """Union of transversal subspaces <p, phi(p)> joining a Witt-index-1
    quadric to a spread (a line's points, for the cubic scroll)."""
    field: object
    n: int
    quadric_pts: tuple          # points of Q, order fixed
    members: tuple              # spread members, aligned with quadric_pts
    transversals: tuple         # Subspaces <p, phi(p)>
    point_sets: tuple           # per transversal: frozenset of its points
    spread_side: Subspace       # span of all members
    all_points: frozenset

    def transversal_index_of(self, p):
        for i, ps in enumerate(self.point_sets):
            if p in ps:
                return i
        return None


def build_scroll(field, quadric_pts, members):
    """Scroll from an aligned pairing quadric_pts[i] <-> members[i]."""
    n = len(quadric_pts[0])
    transversals = []
    point_sets = []
    allpts = set()
    for p, m in zip(quadric_pts, members):
        t = span(field, [p] + list(m.rows), n)
        if t.vdim != m.vdim + 1:
            raise GeometryError("quadric point lies on its spread member")
        transversals.append(t)
        pts = frozenset(t.points())
        point_sets.append(pts)
        allpts |= pts
    spread_side = span(field, [r for m in members for r in m.rows], n)
    return Scroll(field, n, tuple(quadric_pts), tuple(members),
                  tuple(transversals), tuple(point_sets), spread_side,
                  frozenset(allpts))


def build_cubic_scroll(field, line_pts, conic_pts, pairing=None):
    """Normal rational cubic scroll from a line and a conic in complementary
    subspaces of PG(4, K); the projectivity defaults to index alignment."""
    if pairing is None:
        pairing = list(range(len(conic_pts)))
    members = [Subspace(field, 5, (line_pts[i],)) for i in pairing]
    return build_scroll(field, list(conic_pts), members)


def canonical_cubic_scroll(field):
    conic = normal_rational_curve(field, 2)
    conic5 = [tuple(p) + (field.zero, field.zero) for p in conic]
    line = normal_rational_curve(field, 1)
    line5 = [(field.zero,) * 3 + tuple(p) for p in line]
    return build_cubic_scroll(field, line5, conic5)


def canonical_regular_scroll(d, q):
    """Regular d-scroll in PG(3d+1, q) from the norm-form quadric of
    F_{q^d} and the field-reduction spread, paired through PG(1, q^d)."""
    K = GF(q)
    L = GF(q ** d)
    emb, basis, coords = vector_space_view(L, K)
    n = 3 * d + 2
    # quadric side: x0 x1 = N(b), points (1, N(b), b) and (0, 1, 0...) in
    # the first (d+2) coordinates
    qpts = []
    members = []
    spread = regular_spread(d, q, m=2)

    def qpoint(l):
        # norm of the quadratic K-algebra L: l^2 for L = K, the field
        # norm l^(1+q) for the degree-2 extension
        if d == 1:
            acc = L.mul(l, l)
        else:
            acc = L.one
            x = l
            for _ in range(d):
                acc = L.mul(acc, x)
                xq = x
                for _ in range(K.k):
                    xq = L.frobenius(xq)
                x = xq
        norm_val = next(kk for kk, vv in emb.items() if vv == acc)
        vec = [K.one, norm_val] + list(coords[l]) + [K.zero] * (2 * d)
        return normalize_point(K, tuple(vec))

    def spread_member(lpt):
        rows = []
        for lam in basis:
            vec = [K.zero] * (d + 2)
            for comp in lpt:
                vec.extend(coords[L.mul(lam, comp)])
            rows.append(tuple(vec))
        return span(K, rows, n)

    for l in L.elements():
        qpts.append(qpoint(l))
        members.append(spread_member((L.one, l)))
    # the point at infinity of PG(1, L)
    qpts.append(normalize_point(K, tuple([K.zero, K.one] + [K.zero] * 3 * d)))
    members.append(spread_member((L.zero, L.one)))
    return build_scroll(K, qpts, members)


def scroll_quadrics(scroll):
    """All Witt-index-1 quadrics on the scroll meeting every transversal
    exactly once off the spread side.  Search driven by point pairs on the
    first two transversals, with meet-based early rejection."""
    field = scroll.field
    n = scroll.n
    d = scroll.transversals[0].vdim - 1       # quadric lives in a (d+1)-space
    spread_pts = frozenset(scroll.spread_side.points())
    off = [sorted(ps - spread_pts) for ps in scroll.point_sets]
    found = {}
    rest = list(range(d + 2, len(scroll.transversals)))

    def complete(u_span):
        pts = []
        for ti in rest:
            mm = meet(u_span, scroll.transversals[ti])
            if mm.vdim != 1:
                return None
            p = normalize_point(field, mm.rows[0])
            if p in spread_pts:
                return None
            pts.append(p)
        return pts

    for p in off[0]:
        for q in off[1]:
            # a quadric spans a (d+1)-space: seed it with d+2 points, one
            # on each of the first d+2 transversals
            seeds = [[p, q]]
            for extra in range(d):
                new = []
                for s in seeds:
                    for r in off[2 + extra]:
                        new.append(s + [r])
                seeds = new
            for seed in seeds:
                u = span(field, seed, n)
                if u.vdim != d + 2:
                    continue
                tail = complete(u)
                if tail is None:
                    continue
                pts = tuple(sorted(set(seed + tail)))
                if len(pts) != len(scroll.transversals):
                    continue
                if pts in found:
                    continue
                forms = pj.exact_zero_set_forms(
                    field, [intrinsic_coords(u, x) for x in pts], u.vdim,
                    witt=1)
                if not forms:
                    continue
                found[pts] = (u, forms[0])
    return found


def quadric_through(scroll, quadrics, p, q):
    """The unique scroll quadric through valid p, q (errors otherwise)."""
    ti, tj = scroll.transversal_index_of(p), scroll.transversal_index_of(q)
    if ti is None or tj is None:
        raise GeometryError("points not on the scroll")
    if ti == tj:
        raise GeometryError("points on the same transversal")
    spread_pts = frozenset(scroll.spread_side.points())
    if p in spread_pts or q in spread_pts:
        raise GeometryError("points on the spread side")
    hits = [pts for pts in quadrics if p in pts and q in pts]
    if len(hits) != 1:
        raise GeometryError("found %d quadrics through the pair" % len(hits))
    return hits[0]


def verify_unique_quadrics(scroll, quadrics):
    """Every valid pair lies in exactly one quadric; pairwise intersections
    are single scroll points off the spread."""
    spread_pts = frozenset(scroll.spread_side.points())
    pair_count = {}
    for pts in quadrics:
        for a, b in itertools.combinations(pts, 2):
            key = (a, b) if a < b else (b, a)
            pair_count[key] = pair_count.get(key, 0) + 1
    valid_pairs = 0
    for i, j in itertools.combinations(range(len(scroll.point_sets)), 2):
        for a in scroll.point_sets[i] - spread_pts:
            for b in scroll.point_sets[j] - spread_pts:
                key = (a, b) if a < b else (b, a)
                if pair_count.get(key, 0) != 1:
                    return False, ("pair", a, b, pair_count.get(key, 0))
                valid_pairs += 1
    for s1, s2 in itertools.combinations(quadrics, 2):
        inter = set(s1) & set(s2)
        if len(inter) != 1 or next(iter(inter)) in spread_pts:
            return False, ("intersection", s1, s2, len(inter))
    return True, valid_pairs


def spread_cross_ratio(field, members, avoid=None):
    """Cross-ratio of four pairwise disjoint subspaces of a regulus or
    pencil, measured on a common transversal line avoiding `avoid`."""
    m1, m2 = members[0], members[1]
    for p in m1.points():
        if avoid is not None and avoid.rows and avoid.contains(p):
            continue
        for r in m2.points():
            if avoid is not None and avoid.rows and avoid.contains(r):
                continue
            line = span(field, [p, r], m1.n)
            if line.vdim != 2:
                continue
            hits = []
            good = True
            for m in members:
                mm = meet(line, m)
                if mm.vdim != 1:
                    good = False
                    break
                hits.append(mm.rows[0])
            if good and (avoid is None or not avoid.rows
                         or not meet(line, avoid).rows):
                return cross_ratio(field, *hits)
    raise GeometryError("no common transversal found")


def pairing_is_projectivity(scroll, max_checks=60):
    """Certify the stored pairing: conics of the quadric side go to
    reguli (pencils, for point members) with matching cross-ratio.
    Vacuous at q = 2, where lines carry only three points."""
    field = scroll.field
    if field.q < 3:
        return "vacuous"
    pair = dict(zip(scroll.quadric_pts, scroll.members))
    qspan = span(field, list(scroll.quadric_pts), scroll.n)
    checked = 0
    for conic in pj.conic_sections(field, scroll.quadric_pts, qspan):
        members = [pair[p] for p in conic]
        if members[0].vdim >= 2:
            reg = {m.rows for m in regulus(*members[:3])}
            if reg != {m.rows for m in members}:
                return False
        for quad in itertools.permutations(conic[:4]):
            val = pj.conic_cross_ratio(field,
                                       span(field, list(conic), scroll.n),
                                       list(conic), list(quad))
            tval = spread_cross_ratio(field, [pair[p] for p in quad])
            if val != tval:
                return False
            checked += 1
            if checked >= max_checks:
                return True
    return True if checked else "vacuous"


def scroll_dump(scroll, quadrics=None):
    """JSON-friendly dump of the transversal pairings and quadric lists."""
    from . import projective as pjm
    field = scroll.field
    out = {
        "pairing": [{
            "point": pjm.point_to_json(field, p),
            "member": pjm.subspace_to_json(m),
        } for p, m in zip(scroll.quadric_pts, scroll.members)],
        "spread_side": pjm.subspace_to_json(scroll.spread_side),
    }
    if quadrics is not None:
        out["quadrics"] = [[pjm.point_to_json(field, p) for p in pts]
                           for pts in sorted(quadrics)]
    return out


# --------------------------------------------------------------------------
# affine sections of two paired quadrics sharing a point

def alpha_section(field, pairing, shared, n, candidate_limit=None):
    """Affine d-space meeting all transversals <x, phi(x)> of a pairing of
    two Witt-index-1 quadrics sharing `shared`.

    `pairing` is a list of (x, phi_x) with x != shared.  Returns
    (alpha_span, affine_points, infinity_subspace, images) where images[i]
    is the alpha-point on transversal i.
    """
    lines = [span(field, [x, y], n) for (x, y) in pairing]
    d = _alpha_dim(len(pairing), field)
    head = lines[: min(len(lines), d + 4)]
    for base in itertools.combinations(head, d + 1):
        choices = [l.points() for l in base]
        for combo in itertools.product(*choices):
            al = span(field, list(combo), n)
            if al.vdim != d + 1:
                continue
            images = []
            ok = True
            for l in lines:
                mm = meet(al, l)
                if mm.vdim != 1:
                    ok = False
                    break
                images.append(normalize_point(field, mm.rows[0]))
            if not ok or len(set(images)) != len(lines):
                continue
            img_set = set(images)
            infinity = [p for p in al.points() if p not in img_set]
            inf_rows, _ = rref(field, infinity)
            if len(inf_rows) != d:
                continue
            inf_space = Subspace(field, n, tuple(inf_rows))
            if any(p not in set(inf_space.points()) for p in infinity):
                continue
            return al, images, inf_space
    raise GeometryError("no affine section found")


def _alpha_dim(n_transversals, field):
    # q^d transversals off the shared point
    q = field.q
    d = 0
    size = 1
    while size < n_transversals:
        size *= q
        d += 1
    if size != n_transversals:
        raise GeometryError("transversal count %d is not a power of q"
                            % n_transversals)
    return d
