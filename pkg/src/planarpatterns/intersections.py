"""Intersection types of a pattern with simple boundary.

Two occurrences of a pattern intersect when they share an interior face.  The
union of such a pair, rooted on a face that is interior to neither, is a
rooted intersection type; rotating the root along that face gives the
rotations, and an intersection type is a rotation class.

The catalog is built by growing the pattern: every intersecting pair contains
one copy ``p1`` of the pattern, and the edges of the second copy that are not
edges of ``p1`` lie in faces of ``p1`` that are not interior to it.  Since
``p2`` shares at least one interior face with ``p1``, at most
``E(p) - (edges of the smallest interior face)`` edges have to be added.  All
maps obtained from ``p1`` by that many chords or pendant edges in its
non-interior faces are generated up to isomorphism, and every second
occurrence covering the added edges yields candidate types.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .enumeration import MarkingTerm
from .maps import (BoundaryShape, MapError, Occurrence, Pattern, RootedMap,
                   boundary_shape_of_rooted, face_boundary, find_occurrences,
                   polygon, rooted_face_class)


class IntersectionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small map surgery helpers
# ---------------------------------------------------------------------------

def _restricted_sigma(m: RootedMap, keep: set) -> dict:
    s = m.sigma
    out = {}
    for d in keep:
        e = s[d]
        while e not in keep:
            e = s[e]
        out[d] = e
    return out


def _bfs_order(sig: dict, alpha: Sequence, root: int) -> list[int]:
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for e in (sig[d], alpha[d]):
            if e not in seen:
                seen.add(e)
                order.append(e)
    return order


def _connected(m: RootedMap, keep: set) -> bool:
    if not keep:
        return True
    sig = _restricted_sigma(m, keep)
    return len(_bfs_order(sig, m.alpha, next(iter(keep)))) == len(keep)


def _labelled_submap(m: RootedMap, keep: set, root: int) -> tuple[RootedMap, dict]:
    """Submap on ``keep`` relabelled from ``root``, with the old-to-new dart labels."""
    sig = _restricted_sigma(m, keep)
    order = _bfs_order(sig, m.alpha, root)
    if len(order) != len(keep):
        raise MapError("submap is disconnected")
    lab = {d: i for i, d in enumerate(order)}
    sub = RootedMap(tuple(lab[sig[d]] for d in order), tuple(lab[m.alpha[d]] for d in order), 0)
    return sub, lab


def _pair_key(m: RootedMap, root: int, occs: Iterable[frozenset]) -> tuple:
    order = m.canonical_labels(root)
    pos = {d: i for i, d in enumerate(order)}
    pair = tuple(sorted(tuple(sorted(pos[d] for d in o)) for o in occs))
    return m.canonical_form(root), pair


def rooted_type_keys(m: RootedMap, outer_dart: int, occs: tuple) -> set:
    """Keys of all rootings of ``m`` whose root face is the face through ``outer_dart``."""
    return {_pair_key(m, m.alpha[x], occs) for x in m.face_walk(outer_dart)}


def _outer_side(host: RootedMap, keep: set) -> int:
    """A dart of ``keep`` lying on the face of the submap that contains the host root face."""
    fidx = host.face_index()
    faces = host.faces()
    start = fidx[host.alpha[host.root]]
    seen = {start}
    todo = [start]
    while todo:
        f = todo.pop()
        for d in faces[f]:
            if d in keep:
                return d
            g = fidx[host.alpha[d]]
            if g not in seen:
                seen.add(g)
                todo.append(g)
    raise MapError("submap does not touch the root region")


def union_type_key(host: RootedMap, o1: Occurrence, o2: Occurrence) -> tuple:
    """Type key of the union of two occurrences, seen from the host's root face."""
    keep = set(o1.dart_image) | set(o2.dart_image)
    x = _outer_side(host, keep)
    sub, lab = _labelled_submap(host, keep, host.alpha[x])
    occs = (frozenset(lab[d] for d in o1.interior), frozenset(lab[d] for d in o2.interior))
    return min(rooted_type_keys(sub, sub.alpha[sub.root], occs))


# ---------------------------------------------------------------------------
# catalog data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceClass:
    index: int
    key: bytes
    boundary: RootedMap  # boundary submap rooted on its outer side
    shape: BoundaryShape
    c: int

    @property
    def valency(self) -> int:
        return self.shape.valency


@dataclass(frozen=True)
class IntersectionType:
    index: int
    map: RootedMap  # canonical rooted intersection type, root 0
    occurrences: tuple  # interior dart sets of the two occurrences in ``map``
    key: tuple
    r: int
    deletion_set: tuple  # deleted edges as (dart, alpha(dart)) in ``map`` labels
    post_deletion: RootedMap
    deletion_dart: int  # a dart of the deletion face in ``post_deletion``
    c: int
    shape: BoundaryShape
    face_class: int

    @property
    def d(self) -> int:
        return len(self.deletion_set)

    @property
    def edge_count(self) -> int:
        return self.map.edge_count


def deletion_procedure(m: RootedMap, occs: tuple) -> tuple[tuple, RootedMap, int]:
    """Delete interior edges of the two occurrences greedily in dart-label order.

    An edge is deleted when the remaining map stays connected and keeps all of
    its vertices.  Returns the deleted edges, the post-deletion map (rooted at
    the same root) and a dart of its deletion face.
    """
    inter = set(occs[0]) | set(occs[1])
    cand = sorted({min(d, m.alpha[d]) for o in occs for d in o if m.alpha[d] in o})
    keep = set(range(m.dart_count))
    vid = m.vertex_index()
    verts = {vid[d] for d in keep}
    deleted = []
    for e in cand:
        trial = keep - {e, m.alpha[e]}
        if {vid[d] for d in trial} != verts or not _connected(m, trial):
            continue
        keep = trial
        deleted.append((e, m.alpha[e]))
    if m.root not in keep:
        raise IntersectionError("the root edge was deleted")
    post, lab = _labelled_submap(m, keep, m.root)
    left = [lab[d] for d in sorted(inter) if d in keep]
    if left:
        dart = left[0]
    else:
        # every interior dart was deleted; the deletion face is the face that
        # absorbed them, found through the boundary dart next to a deleted one
        d0 = deleted[0][0]
        x = m.sigma[d0]
        while x not in keep:
            x = m.sigma[x]
        dart = lab[x]
    return tuple(deleted), post, dart


@dataclass
class IntersectionCatalog:
    pattern: Pattern
    types: list = field(default_factory=list)
    face_classes: list = field(default_factory=list)  # index 0 holds class 1
    t: dict = field(default_factory=dict)

    @property
    def l0(self) -> int:
        return self.pattern.l0

    @property
    def d0(self) -> int:
        return self.pattern.d0

    @property
    def r0(self) -> int:
        return self.pattern.r0

    def __len__(self) -> int:
        return len(self.types)

    def type(self, i: int) -> IntersectionType:
        return self.types[i - 1]

    def face_class(self, j: int) -> FaceClass:
        return self.face_classes[j - 1]

    def index_of(self, key: tuple) -> int | None:
        for ty in self.types:
            if ty.key == key:
                return ty.index
        return None

    def overcount_factor(self, i: int) -> Fraction:
        """r_i / c_{t(i)}; for ``i = 0`` the single pattern's factor r0."""
        if i == 0:
            return Fraction(self.r0)
        ty = self.type(i)
        return Fraction(ty.r, self.face_class(ty.face_class).c)

    def deleted_edges(self, i: int) -> int:
        return self.d0 if i == 0 else self.type(i).d

    def marking_terms(self) -> list[MarkingTerm]:
        """One term per face class; variable ``j - 1`` marks class ``j``."""
        out = []
        for fc in self.face_classes:
            sh = fc.shape
            out.append(MarkingTerm(fc.index - 1, fc.c, sh.e, sh.h, tuple(sh.s)))
        return out

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.name,
            "l0": self.l0, "d0": self.d0, "r0": self.r0,
            "types": [{
                "i": ty.index, "r": ty.r, "d": ty.d, "c": ty.c,
                "shape": ty.shape.to_dict(), "t": ty.face_class,
                "map": ty.map.to_text(),
                "occurrences": [sorted(o) for o in ty.occurrences],
                "post_deletion": ty.post_deletion.to_text(),
            } for ty in self.types],
            "t": {str(i): j for i, j in sorted(self.t.items())},
            "face_classes": [{
                "j": fc.index, "c": fc.c, "shape": fc.shape.to_dict(),
                "boundary": fc.boundary.to_text(),
            } for fc in self.face_classes],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _grown_maps(pat: Pattern, max_add: int) -> list[RootedMap]:
    """Maps obtained from the pattern by adding up to ``max_add`` edges inside faces
    that are not interior to it; pattern darts keep their labels."""
    m = pat.map
    n0 = m.dart_count
    interior = set(pat.interior_darts)
    vid0 = m.vertex_index()
    loops = any(vid0[d] == vid0[m.alpha[d]] for d in range(n0))

    def key(s, a):
        M = RootedMap(tuple(s), tuple(a), m.root)
        order = M.canonical_labels()
        pos = {d: i for i, d in enumerate(order)}
        return M.canonical_form() + bytes(pos[d] for d in range(n0))

    start = (list(m.sigma), list(m.alpha))
    seen = {key(*start)}
    frontier = [start]
    out = [m]
    for _ in range(max_add):
        nxt = []
        for s, a in frontier:
            M = RootedMap(tuple(s), tuple(a), m.root)
            vid = M.vertex_index()
            sinv = [0] * len(s)
            for d, e in enumerate(s):
                sinv[e] = d
            for F in M.faces():
                if any(d in interior for d in F):
                    continue
                L = len(F)
                moves = []
                for i in range(L):
                    moves.append((F[i], None))
                    if loops:
                        moves.append((F[i], F[i]))
                    for j in range(i + 1, L):
                        if loops or vid[F[i]] != vid[F[j]]:
                            moves.append((F[i], F[j]))
                N = len(s)
                A, B = N, N + 1
                for f1, f2 in moves:
                    s2 = s + [0, 0]
                    a2 = a + [B, A]
                    s2[sinv[f1]] = A
                    s2[A] = f1
                    if f2 is None:
                        s2[B] = B
                    elif f2 == f1:
                        s2[A] = B
                        s2[B] = f1
                    else:
                        s2[sinv[f2]] = B
                        s2[B] = f2
                    k = key(s2, a2)
                    if k not in seen:
                        seen.add(k)
                        nxt.append((s2, a2))
        frontier = nxt
        out.extend(RootedMap(tuple(s), tuple(a), m.root) for s, a in nxt)
    return out


def _canonical_type(M: RootedMap, key: tuple) -> tuple[RootedMap, tuple]:
    form, pair = key
    for x in range(M.dart_count):
        if M.canonical_form(x) == form:
            R = M.relabelled(M.canonical_labels(x))
            return R, tuple(frozenset(o) for o in pair)
    raise IntersectionError("canonical rooting not found")


def enumerate_intersection_types(pat: Pattern) -> IntersectionCatalog:
    """Complete list of intersection types of ``pat`` with deletion data."""
    if not isinstance(pat, Pattern):
        raise IntersectionError("expected a Pattern")
    m = pat.map
    max_add = m.edge_count - pat.min_face_edges()
    I1 = frozenset(pat.interior_darts)
    E1 = {min(d, m.alpha[d]) for d in range(m.dart_count)}
    found = {}
    for M in _grown_maps(pat, max_add):
        fidx = M.face_index()
        f1 = {fidx[d] for d in I1}
        allE = {min(d, M.alpha[d]) for d in range(M.dart_count)}
        for occ in find_occurrences(M, pat, respect_root=False):
            if occ.interior == I1:
                continue
            f2 = occ.interior_face_ids(M)
            if not f1 & f2 or E1 | occ.edges(M) != allE:
                continue
            occs = (I1, occ.interior)
            for F in M.faces():
                if fidx[F[0]] in f1 or fidx[F[0]] in f2:
                    continue
                keys = rooted_type_keys(M, F[0], occs)
                k = min(keys)
                if k not in found:
                    found[k] = (len(keys), M)
    order = sorted(found, key=lambda k: (len(k[0]), k))

    cat = IntersectionCatalog(pat)
    polygon_B = polygon(pat.l0)
    key0, c0 = rooted_face_class(polygon_B)
    cat.face_classes.append(FaceClass(1, key0, polygon_B, boundary_shape_of_rooted(polygon_B), c0))
    class_of = {key0: 1}
    cat.t[0] = 1
    for i, k in enumerate(order, start=1):
        r, M = found[k]
        R, occs = _canonical_type(M, k)
        deleted, post, dart = deletion_procedure(R, occs)
        B = face_boundary(post, dart)
        ck, c = rooted_face_class(B)
        shape = boundary_shape_of_rooted(B)
        if ck not in class_of:
            class_of[ck] = len(cat.face_classes) + 1
            cat.face_classes.append(FaceClass(class_of[ck], ck, B, shape, c))
        j = class_of[ck]
        cat.t[i] = j
        cat.types.append(IntersectionType(i, R, occs, k, r, deleted, post, dart, c, shape, j))
    return cat


# ---------------------------------------------------------------------------
# brute-force witnesses
# ---------------------------------------------------------------------------

def intersecting_pairs(host: RootedMap, pat: Pattern, occs: list | None = None):
    """Unordered pairs of occurrences in ``host`` sharing an interior face."""
    if occs is None:
        occs = find_occurrences(host, pat)
    faces = [o.interior_face_ids(host) for o in occs]
    for a in range(len(occs)):
        for b in range(a + 1, len(occs)):
            if faces[a] & faces[b]:
                yield occs[a], occs[b]


def witnessed_keys(host: RootedMap, pat: Pattern) -> list[tuple]:
    """Type keys of all intersecting pairs in ``host``."""
    return [union_type_key(host, a, b) for a, b in intersecting_pairs(host, pat)]


def intersection_degree(host: RootedMap, pat: Pattern) -> int:
    """Largest number of other occurrences one occurrence intersects."""
    occs = find_occurrences(host, pat)
    deg = [0] * len(occs)
    faces = [o.interior_face_ids(host) for o in occs]
    for a in range(len(occs)):
        for b in range(a + 1, len(occs)):
            if faces[a] & faces[b]:
                deg[a] += 1
                deg[b] += 1
    return max(deg, default=0)


def intersection_degree_bound(pat: Pattern) -> int:
    """v * f^2 with v vertices and f interior faces of the pattern."""
    v, _e, _f = pat.map.counts
    return v * pat.interior_face_count ** 2


def _face_lengths(s: tuple) -> list[int]:
    """Face lengths of a bare sigma with ``alpha(d) = d ^ 1``; the root face first."""
    n = len(s)
    seen = bytearray(n)
    out = []
    start = (n - 2) ^ 1
    order = [start] + list(range(n))
    for d0 in order:
        if seen[d0]:
            continue
        k = 0
        d = d0
        while not seen[d]:
            seen[d] = 1
            k += 1
            d = s[d ^ 1]
        out.append(k)
    return out


@dataclass
class WitnessScan:
    """Brute-force statistics of intersecting pairs over all maps of one size."""
    n: int
    pair_counts: dict  # type index -> number of (map, unordered intersecting pair)
    unknown: set  # witnessed keys missing from the catalog
    max_degree: int


def scan_intersections(cat: IntersectionCatalog, n: int, limit: int | None = None) -> WitnessScan:
    """Count intersecting pairs of each type over all rooted maps with ``n`` edges."""
    from .generate import DEFAULT_LIMIT, as_map, brute_force_sigmas
    pat = cat.pattern
    lens = [len(f) for f in pat.interior_faces]
    allowed = set(lens)
    need = len(lens) + 1
    counts: dict = {}
    unknown = set()
    max_deg = 0
    index = {ty.key: ty.index for ty in cat.types}
    for s in brute_force_sigmas(n, DEFAULT_LIMIT if limit is None else limit):
        if s is None:
            continue
        fl = _face_lengths(s)
        if sum(1 for L in fl[1:] if L in allowed) < need:
            continue
        host = as_map(s)
        occs = find_occurrences(host, pat)
        if len(occs) < 2:
            continue
        deg = [0] * len(occs)
        faces = [o.interior_face_ids(host) for o in occs]
        for a in range(len(occs)):
            for b in range(a + 1, len(occs)):
                if not faces[a] & faces[b]:
                    continue
                deg[a] += 1
                deg[b] += 1
                k = union_type_key(host, occs[a], occs[b])
                i = index.get(k)
                if i is None:
                    unknown.add(k)
                else:
                    counts[i] = counts.get(i, 0) + 1
        max_deg = max(max_deg, max(deg))
    return WitnessScan(n, counts, unknown, max_deg)


def scan_face_classes(cat: IntersectionCatalog, n: int, limit: int | None = None) -> dict:
    """Number of (map, non-root face) pairs per face class over maps with ``n`` edges."""
    from .generate import DEFAULT_LIMIT, as_map, brute_force_sigmas
    from .maps import face_class_key
    by_len: dict = {}
    for fc in cat.face_classes:
        by_len.setdefault(fc.valency, {})[fc.key] = fc.index
    out = {fc.index: 0 for fc in cat.face_classes}
    for s in brute_force_sigmas(n, DEFAULT_LIMIT if limit is None else limit):
        if s is None:
            continue
        fl = _face_lengths(s)
        if not any(L in by_len for L in fl[1:]):
            continue
        host = as_map(s)
        rf = set(host.root_face())
        for f in host.faces():
            table = by_len.get(len(f))
            if table is None or f[0] in rf:
                continue
            j = table.get(face_class_key(host, f[0]))
            if j is not None:
                out[j] += 1
    return out


def overcount_check(cat: IntersectionCatalog, n_max: int, limit: int | None = None) -> list[dict]:
    """Brute-force check of m_i(n) = r_i / c_{t(i)} * m~_{t(i)}(n - d_i) for every
    type witnessed in maps with at most ``n_max`` edges."""
    rows = []
    class_counts: dict = {}
    for n in range(1, n_max + 1):
        scan = scan_intersections(cat, n, limit)
        for i, m_i in sorted(scan.pair_counts.items()):
            ty = cat.type(i)
            nn = n - ty.d
            if nn not in class_counts:
                class_counts[nn] = scan_face_classes(cat, nn, limit)
            tilde = class_counts[nn][ty.face_class]
            rows.append({"n": n, "i": i, "m": m_i, "m_tilde": tilde,
                         "factor": cat.overcount_factor(i),
                         "ok": Fraction(m_i) == cat.overcount_factor(i) * tilde})
    return rows
