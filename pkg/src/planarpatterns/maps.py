"""Rooted planar maps as rotation systems.

Conventions used everywhere in the package:

* darts are ``0 .. 2E-1``; ``alpha`` pairs the two darts of an edge;
* ``sigma`` turns counterclockwise around the vertex a dart leaves from;
* faces are the orbits of ``phi = sigma o alpha`` (``phi(d) = sigma[alpha[d]]``);
* the root face is the phi-orbit of ``alpha[root]``.

The map with no edges (a single vertex) has no darts and ``root=None``.
"""

from __future__ import annotations

import re
from array import array
from importlib import resources
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class MapError(ValueError):
    """Raised for malformed maps and map files."""


def _orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out


@dataclass(frozen=True)
class RootedMap:
    sigma: tuple
    alpha: tuple
    root: int | None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    # -- construction -----------------------------------------------------
    @classmethod
    def vertex(cls) -> "RootedMap":
        return cls((), (), None)

    @classmethod
    def from_sigma(cls, sigma: Sequence[int], root: int | None) -> "RootedMap":
        """Map whose edges pair darts ``2i`` and ``2i+1``."""
        return cls(tuple(sigma), tuple(d ^ 1 for d in range(len(sigma))), root)

    @classmethod
    def from_cycles(cls, vertices: Iterable[Iterable[int]], edges: Iterable[tuple[int, int]],
                    root: int) -> "RootedMap":
        """Build from counterclockwise dart cycles per vertex and dart pairs per edge."""
        sig = {}
        for cyc in vertices:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                sig[a] = b
        alp = {}
        for a, b in edges:
            alp[a] = b
            alp[b] = a
        n = len(sig)
        if set(sig) != set(range(n)) or set(alp) != set(range(n)):
            raise MapError("darts must be numbered 0..2E-1 and covered by both permutations")
        return cls(tuple(sig[d] for d in range(n)), tuple(alp[d] for d in range(n)), root)

    # -- basic structure --------------------------------------------------
    @property
    def dart_count(self) -> int:
        return len(self.sigma)

    @property
    def edge_count(self) -> int:
        return len(self.sigma) // 2

    def phi(self, d: int) -> int:
        return self.sigma[self.alpha[d]]

    @property
    def phi_perm(self) -> tuple:
        c = self._cache
        if "phi" not in c:
            s, a = self.sigma, self.alpha
            c["phi"] = tuple(s[a[d]] for d in range(len(s)))
        return c["phi"]

    def vertices(self) -> list[list[int]]:
        c = self._cache
        if "vertices" not in c:
            c["vertices"] = _orbits(self.sigma)
        return c["vertices"]

    def faces(self) -> list[list[int]]:
        c = self._cache
        if "faces" not in c:
            c["faces"] = _orbits(self.phi_perm)
        return c["faces"]

    def vertex_index(self) -> list[int]:
        c = self._cache
        if "vidx" not in c:
            idx = [0] * self.dart_count
            for i, cyc in enumerate(self.vertices()):
                for d in cyc:
                    idx[d] = i
            c["vidx"] = idx
        return c["vidx"]

    def face_index(self) -> list[int]:
        c = self._cache
        if "fidx" not in c:
            idx = [0] * self.dart_count
            for i, cyc in enumerate(self.faces()):
                for d in cyc:
                    idx[d] = i
            c["fidx"] = idx
        return c["fidx"]

    def edges(self) -> list[tuple[int, int]]:
        return [(d, self.alpha[d]) for d in range(self.dart_count) if d < self.alpha[d]]

    def face_walk(self, d: int) -> list[int]:
        """Darts of the face containing ``d``, starting at ``d``."""
        out = [d]
        p = self.phi(d)
        while p != d:
            out.append(p)
            p = self.phi(p)
        return out

    def root_face(self) -> list[int]:
        if self.root is None:
            return []
        return self.face_walk(self.alpha[self.root])

    def root_valency(self) -> int:
        return len(self.root_face())

    @property
    def counts(self) -> tuple[int, int, int]:
        """(V, E, F); the vertex map has one vertex and one face."""
        if self.dart_count == 0:
            return 1, 0, 1
        return len(self.vertices()), self.edge_count, len(self.faces())

    # -- checks -----------------------------------------------------------
    def validate(self) -> dict:
        """Check the rotation-system invariants; raise MapError on the first failure."""
        n = self.dart_count
        if len(self.alpha) != n:
            raise MapError("sigma and alpha have different sizes")
        if n == 0:
            if self.root is not None:
                raise MapError("the vertex map has no root dart")
            return {"V": 1, "E": 0, "F": 1}
        if n % 2:
            raise MapError("odd number of darts")
        if sorted(self.sigma) != list(range(n)):
            raise MapError("sigma is not a permutation")
        for d in range(n):
            a = self.alpha[d]
            if not 0 <= a < n or a == d or self.alpha[a] != d:
                raise MapError("alpha is not a fixed-point-free involution")
        if self.root is None or not 0 <= self.root < n:
            raise MapError("root dart out of range")
        seen = {0}
        todo = [0]
        while todo:
            d = todo.pop()
            for e in (self.sigma[d], self.alpha[d]):
                if e not in seen:
                    seen.add(e)
                    todo.append(e)
        if len(seen) != n:
            raise MapError("map is disconnected")
        v, e, f = self.counts
        if v - e + f != 2:
            raise MapError(f"positive genus: V-E+F = {v - e + f}")
        return {"V": v, "E": e, "F": f}

    # -- canonical forms and rerooting ------------------------------------
    def canonical_labels(self, root: int | None = None) -> list[int]:
        """Darts in breadth-first order from ``root`` following sigma then alpha."""
        if root is None:
            root = self.root
        if root is None:
            return []
        s, a = self.sigma, self.alpha
        order = [root]
        seen = {root}
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for e in (s[d], a[d]):
                if e not in seen:
                    seen.add(e)
                    order.append(e)
        return order

    def canonical_form(self, root: int | None = None) -> bytes:
        """Byte string equal for two maps iff they are root-preserving isomorphic."""
        order = self.canonical_labels(root)
        if not order:
            return b""
        lab = {d: i for i, d in enumerate(order)}
        s, a = self.sigma, self.alpha
        out = array("I")
        for d in order:
            out.append(lab[s[d]])
            out.append(lab[a[d]])
        return out.tobytes()

    def relabelled(self, order: Sequence[int] | None = None) -> "RootedMap":
        """Copy with darts renumbered in ``order`` (canonical order by default)."""
        if order is None:
            order = self.canonical_labels()
        if not order:
            return self
        lab = {d: i for i, d in enumerate(order)}
        s = tuple(lab[self.sigma[d]] for d in order)
        a = tuple(lab[self.alpha[d]] for d in order)
        return RootedMap(s, a, 0)

    def rerooted(self, root: int) -> "RootedMap":
        return RootedMap(self.sigma, self.alpha, root)

    def rotation_roots(self) -> list[int]:
        """Root darts whose root face is the current root face."""
        return [self.alpha[x] for x in self.root_face()]

    def rotations(self) -> tuple[int, list["RootedMap"]]:
        """Number of pairwise non-isomorphic rerootings along the root face.

        Returns the count and one representative per class, sorted by
        canonical form.
        """
        if self.root is None:
            return 1, [self]
        reps = {}
        for r in self.rotation_roots():
            f = self.canonical_form(r)
            if f not in reps:
                reps[f] = self.rerooted(r)
        keys = sorted(reps)
        return len(keys), [reps[k] for k in keys]

    def submap(self, keep_darts: Iterable[int], root: int) -> "RootedMap":
        """Map induced by a set of darts closed under alpha, relabelled from ``root``."""
        keep = set(keep_darts)
        s = self.sigma
        sig = {}
        for d in keep:
            e = s[d]
            while e not in keep:
                e = s[e]
            sig[d] = e
        order = [root]
        seen = {root}
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for e in (sig[d], self.alpha[d]):
                if e not in seen:
                    seen.add(e)
                    order.append(e)
        if len(order) != len(keep):
            raise MapError("submap is disconnected")
        lab = {d: i for i, d in enumerate(order)}
        return RootedMap(tuple(lab[sig[d]] for d in order),
                         tuple(lab[self.alpha[d]] for d in order), 0)

    # -- text format ------------------------------------------------------
    def to_text(self) -> str:
        root = -1 if self.root is None else self.root
        return (f"darts={self.dart_count} root={root}\n"
                + " ".join(map(str, self.sigma)) + "\n"
                + " ".join(map(str, self.alpha)) + "\n")

    @classmethod
    def from_text(cls, text: str) -> "RootedMap":
        m, _ = parse_map_text(text)
        return m


def parse_map_text(text: str) -> tuple[RootedMap, dict]:
    """Parse the three-line map format; extra ``key=value`` tokens on line 1 are returned."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MapError("empty map file")
    header = {}
    for tok in lines[0].split():
        if "=" not in tok:
            raise MapError(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        try:
            header[k] = int(v)
        except ValueError as exc:
            raise MapError(f"bad header value {tok!r}") from exc
    if "darts" not in header or "root" not in header:
        raise MapError("header needs darts= and root=")
    n = header.pop("darts")
    root = header.pop("root")
    if n == 0:
        return RootedMap.vertex(), header
    if len(lines) < 3:
        raise MapError("expected sigma and alpha lines")
    try:
        sigma = tuple(int(t) for t in lines[1].split())
        alpha = tuple(int(t) for t in lines[2].split())
    except ValueError as exc:
        raise MapError("non-integer dart image") from exc
    if len(sigma) != n or len(alpha) != n:
        raise MapError("permutation length does not match darts=")
    m = RootedMap(sigma, alpha, root)
    m.validate()
    return m, header


# ---------------------------------------------------------------------------
# simple boundaries and boundary shapes
# ---------------------------------------------------------------------------

def is_simple_face(m: RootedMap, d: int) -> bool:
    """True if the face through ``d`` is bounded by a simple cycle."""
    walk = m.face_walk(d)
    vid = m.vertex_index()
    verts = {vid[x] for x in walk}
    edges = {min(x, m.alpha[x]) for x in walk}
    return len(verts) == len(walk) == len(edges)


@dataclass(frozen=True)
class BoundaryShape:
    h: int
    e: int
    s: tuple  # s[i-1] = number of attached simple-boundary pieces of valency i

    @property
    def valency(self) -> int:
        return self.h + 2 * self.e + sum((i + 1) * c for i, c in enumerate(self.s))

    def as_vector(self) -> tuple:
        return (self.h, self.e) + tuple(self.s)

    def to_dict(self) -> dict:
        return {"h": self.h, "e": self.e, "s": list(self.s)}


def _region_darts(m: RootedMap, face_darts: set, start_face_dart: int) -> list[int]:
    """Darts of the faces reachable from ``start_face_dart``'s face without crossing
    an edge of ``face_darts``' boundary."""
    border = {x for d in face_darts for x in (d, m.alpha[d])}
    fidx = m.face_index()
    faces = m.faces()
    start = fidx[start_face_dart]
    seen = {start}
    todo = [start]
    out = []
    while todo:
        f = todo.pop()
        for d in faces[f]:
            out.append(d)
            if d in border:
                continue
            g = fidx[m.alpha[d]]
            if g not in seen:
                seen.add(g)
                todo.append(g)
    return out


def face_boundary(m: RootedMap, d: int):
    """Boundary submap data of the face ``F`` through ``d``.

    Returns ``(B, outer)`` where ``B`` is the submap formed by the edges of F,
    rooted so that its root face is the side of F facing the root face of
    ``m`` and its root dart lies in F, and ``outer`` is the outer cycle length.
    """
    F = m.face_walk(d)
    Fset = set(F)
    keep = Fset | {m.alpha[x] for x in F}
    rf = m.root_face()
    if Fset & set(rf):
        # F is the root face itself; look at it from across its first
        # non-bridge edge, the root edge if possible.
        cands = [m.root] + [m.alpha[y] for y in F]
        x = next((c for c in cands if c not in Fset and m.alpha[c] in Fset), None)
        if x is None:
            raise MapError("every edge of the face is a bridge; no outer side")
    else:
        x = None
        for y in _region_darts(m, Fset, rf[0]):
            if y in keep and y not in Fset:
                x = y
                break
        if x is None:
            raise MapError("face is not separated from the root face")
    # In the submap, root dart alpha(x) lies in F and its root face is x's face.
    B = m.submap(keep, m.alpha[x])
    return B


def boundary_shape_of_rooted(B: RootedMap) -> BoundaryShape:
    """Shape of the face of ``B.root`` in a boundary submap rooted on its outer side."""
    F = set(B.face_walk(B.root))
    h = B.root_valency()
    e = sum(1 for d in F if B.alpha[d] in F) // 2
    outer = set(B.root_face())
    lens = []
    for cyc in B.faces():
        c0 = cyc[0]
        if c0 in F or c0 in outer:
            continue
        lens.append(len(cyc))
    s = [0] * (max(lens) if lens else 0)
    for L in lens:
        s[L - 1] += 1
    return BoundaryShape(h, e, tuple(s))


def boundary_shape(m: RootedMap, d: int) -> BoundaryShape:
    """Boundary shape (h, e, s) of the face through dart ``d``.

    The simple h-gon is the cycle of the face boundary that separates the face
    from the root face of ``m``.  A face all of whose edges are bridges (the
    only face of a tree) has ``h = 0``.
    """
    F = set(m.face_walk(d)) if m.dart_count else set()
    if all(m.alpha[x] in F for x in F):
        return BoundaryShape(0, len(F) // 2, ())
    return boundary_shape_of_rooted(face_boundary(m, d))


def face_class_key(m: RootedMap, d: int) -> bytes:
    """Isomorphism key of the face through ``d`` together with its boundary,
    seen from the root face side and taken up to rotation."""
    B = face_boundary(m, d)
    return min(B.canonical_form(r) for r in B.rotation_roots())


def rooted_face_class(B: RootedMap) -> tuple[bytes, int]:
    """(class key, rotation count) of a boundary submap rooted on its outer side."""
    forms = {B.canonical_form(r) for r in B.rotation_roots()}
    return min(forms), len(forms)


# ---------------------------------------------------------------------------
# patterns and occurrences
# ---------------------------------------------------------------------------

class Pattern:
    """A rooted map whose root face is the exterior and whose boundary is a simple cycle."""

    def __init__(self, m: RootedMap, name: str = ""):
        m.validate()
        if m.root is None:
            raise MapError("a pattern needs at least one edge")
        if not is_simple_face(m, m.alpha[m.root]):
            raise MapError("pattern boundary is not simple")
        self.map = m
        self.name = name
        ext = set(m.root_face())
        self.exterior = ext
        self.interior_darts = [x for x in range(m.dart_count) if x not in ext]
        self.interior_edges = [(a, b) for a, b in m.edges() if a not in ext and b not in ext]
        self.boundary_length = len(ext)
        self.interior_faces = [f for f in m.faces() if f[0] not in ext]
        # BFS order over interior darts used by the occurrence search
        r = m.root
        order = [r]
        seen = {r}
        steps = []
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            nxt = [(m.phi(x), "phi")]
            if m.alpha[x] not in ext:
                nxt.append((m.alpha[x], "alpha"))
            for y, how in nxt:
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    steps.append((x, how, y))
        self._steps = steps
        self._order = order
        vid = m.vertex_index()
        self._vertex_of = vid
        self._root_face_len = len(m.face_walk(r))

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "Pattern":
        """Parse the map text format; ``exterior=d`` names a dart of the exterior face."""
        m, header = parse_map_text(text)
        if m.root is None:
            raise MapError("a pattern needs at least one edge")
        if "exterior" in header:
            x = header["exterior"]
            if not 0 <= x < m.dart_count:
                raise MapError("exterior dart out of range")
            if x not in m.root_face():
                m = m.rerooted(m.alpha[x])
        return cls(m, name)

    def to_text(self) -> str:
        m = self.map
        head, rest = m.to_text().split("\n", 1)
        return f"{head} exterior={m.alpha[m.root]}\n{rest}"

    @property
    def l0(self) -> int:
        return self.boundary_length

    @property
    def d0(self) -> int:
        return len(self.interior_edges)

    @property
    def r0(self) -> int:
        return self.map.rotations()[0]

    @property
    def interior_face_count(self) -> int:
        return len(self.interior_faces)

    def min_face_edges(self) -> int:
        m = self.map
        return min(len({min(x, m.alpha[x]) for x in f}) for f in self.interior_faces)


@dataclass(frozen=True)
class Occurrence:
    """An occurrence given by the images of the pattern's darts."""
    dart_image: tuple  # indexed by pattern dart (all darts, exterior ones via alpha)
    interior: frozenset  # host darts lying in the images of interior faces

    def edges(self, host: RootedMap) -> frozenset:
        return frozenset(min(d, host.alpha[d]) for d in self.dart_image)

    def vertices(self, host: RootedMap) -> frozenset:
        vid = host.vertex_index()
        return frozenset(vid[d] for d in self.dart_image)

    def interior_face_ids(self, host: RootedMap) -> frozenset:
        fidx = host.face_index()
        return frozenset(fidx[d] for d in self.interior)


def _extend(host: RootedMap, pat: Pattern, anchor: int):
    m = pat.map
    img = {m.root: anchor}
    used = {anchor}
    hs, ha = host.sigma, host.alpha
    for x, how, y in pat._steps:
        hx = img[x]
        hy = hs[ha[hx]] if how == "phi" else ha[hx]
        if hy in used:
            return None
        img[y] = hy
        used.add(hy)
    # consistency of every relation (the BFS only used a spanning set)
    ext = pat.exterior
    for x in pat._order:
        hx = img[x]
        if img[m.phi(x)] != hs[ha[hx]]:
            return None
        ax = m.alpha[x]
        if ax not in ext and img[ax] != ha[hx]:
            return None
    full = [0] * m.dart_count
    for x in range(m.dart_count):
        if x in ext:
            full[x] = ha[img[m.alpha[x]]]
        else:
            full[x] = img[x]
    if len(set(full)) != m.dart_count:
        return None
    vid = host.vertex_index()
    pv = pat._vertex_of
    seen = {}
    for x in range(m.dart_count):
        hv = vid[full[x]]
        if seen.setdefault(pv[x], hv) != hv:
            return None
    if len(set(seen.values())) != len(seen):
        return None
    return Occurrence(tuple(full), frozenset(img.values()))


def find_occurrences(host: RootedMap, pat: Pattern, respect_root: bool = True,
                     anchors: Iterable[int] | None = None) -> list[Occurrence]:
    """All occurrences of ``pat`` in ``host`` (deduplicated by image).

    With ``respect_root`` the image of an interior face may not be the root
    face of the host.
    """
    if host.dart_count < pat.map.dart_count:
        return []
    faces = host.faces()
    fidx = host.face_index()
    need = pat._root_face_len
    root_face = set(host.root_face()) if respect_root else set()
    out = {}
    cand = range(host.dart_count) if anchors is None else anchors
    for h in cand:
        if len(faces[fidx[h]]) != need:
            continue
        occ = _extend(host, pat, h)
        if occ is None or occ.interior in out:
            continue
        if root_face and occ.interior & root_face:
            continue
        out[occ.interior] = occ
    return list(out.values())


def count_occurrences(host: RootedMap, pat: Pattern) -> int:
    return len(find_occurrences(host, pat))


# ---------------------------------------------------------------------------
# small constructors
# ---------------------------------------------------------------------------

def polygon(k: int) -> RootedMap:
    """Simple k-cycle, rooted so that the root face is one of its two faces."""
    if k < 1:
        raise MapError("polygon needs k >= 1")
    # vertex i carries darts 2i (to vertex i+1) and 2i+1 (from vertex i-1)
    n = 2 * k
    sigma = [0] * n
    alpha = [0] * n
    for i in range(k):
        out_d, in_d = 2 * i, 2 * i + 1
        sigma[out_d] = in_d
        sigma[in_d] = out_d
        j = (i + 1) % k
        alpha[out_d] = 2 * j + 1
        alpha[2 * j + 1] = out_d
    if k == 1:
        sigma = [1, 0]
        alpha = [1, 0]
    return RootedMap(tuple(sigma), tuple(alpha), 0)


def polygon_pattern(k: int) -> Pattern:
    return Pattern(polygon(k), name=f"simple-{k}-gon")


BUILTIN_PATTERNS = ("koala", "double-glued-triangles", "triple-glued-pentagons", "double-triangle")


def builtin_pattern(name: str) -> Pattern:
    """One of the pattern fixtures shipped with the package."""
    if name not in BUILTIN_PATTERNS:
        raise MapError(f"unknown pattern {name!r}; choose from {', '.join(BUILTIN_PATTERNS)}")
    text = resources.files("planarpatterns").joinpath("fixtures", f"{name}.map").read_text()
    return Pattern.from_text(text, name)


def load_pattern(source: str) -> Pattern:
    """A built-in pattern name, ``simple-K-gon``, or a path to a pattern file."""
    if source in BUILTIN_PATTERNS:
        return builtin_pattern(source)
    m = re.fullmatch(r"simple-(\d+)-gon", source)
    if m:
        return polygon_pattern(int(m.group(1)))
    with open(source) as fh:
        return Pattern.from_text(fh.read(), name=source)
