"""Exhaustive generation of rooted planar maps by inverting root-edge deletion.

Maps are produced as bare sigma tuples with ``alpha(d) = d ^ 1`` and the
root dart ``2n-2`` (the most recently added edge), which keeps the inner loop
free of object overhead.  ``None`` stands for the vertex map.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from .maps import RootedMap

DEFAULT_LIMIT = 9


def _root_face(sigma: tuple, root: int) -> list[int]:
    start = root ^ 1
    out = [start]
    d = sigma[start ^ 1]
    while d != start:
        out.append(d)
        d = sigma[d ^ 1]
    return out


def _bridge(s1, s2):
    """Join two maps by a bridge from the root corner of s1 to that of s2."""
    n1 = 0 if s1 is None else len(s1)
    n2 = 0 if s2 is None else len(s2)
    a = n1 + n2
    b = a + 1
    sig = list(s1) if s1 is not None else []
    if s2 is not None:
        sig.extend(x + n1 for x in s2)
    sig.extend((0, 0))
    if s1 is None:
        sig[a] = a
    else:
        r1 = n1 - 2
        sig[a] = sig[r1]
        sig[r1] = a
    if s2 is None:
        sig[b] = b
    else:
        r2 = n2 - 2 + n1
        sig[b] = sig[r2]
        sig[r2] = b
    return tuple(sig)


def _chords(s):
    """All maps obtained by a non-bridge root edge added to ``s`` (k+1 of them)."""
    if s is None:
        yield (1, 0)
        return
    n = len(s)
    a, b = n, n + 1
    r = n - 2
    face = _root_face(s, r)  # x_0 = alpha(r), x_1, ...
    k = len(face)
    base = list(s) + [0, 0]
    # i = 0, loop on the root side
    sig = base[:]
    nxt = sig[r]
    sig[r] = a
    sig[a] = b
    sig[b] = nxt
    yield tuple(sig)
    for i in range(1, k):
        sig = base[:]
        nxt = sig[r]
        sig[r] = a
        sig[a] = nxt
        c = face[i] ^ 1
        nxt = sig[c]
        sig[c] = b
        sig[b] = nxt
        yield tuple(sig)
    sig = base[:]
    nxt = sig[r]
    sig[r] = b
    sig[b] = a
    sig[a] = nxt
    yield tuple(sig)


@lru_cache(maxsize=None)
def _cached(n: int) -> tuple:
    return tuple(_gen(n))


def _gen(n: int) -> Iterator:
    if n == 0:
        yield None
        return
    for s in (_cached(n - 1) if n - 1 <= 6 else _gen(n - 1)):
        yield from _chords(s)
    for n1 in range(n):
        n2 = n - 1 - n1
        left = _cached(n1) if n1 <= 6 else tuple(_gen(n1))
        for s2 in (_cached(n2) if n2 <= 6 else _gen(n2)):
            for s1 in left:
                yield _bridge(s1, s2)


def brute_force_sigmas(n: int, limit: int = DEFAULT_LIMIT) -> Iterator:
    if n < 0 or n > limit:
        raise ValueError(f"n={n} outside the brute-force limit {limit}")
    return _gen(n)


def as_map(s) -> RootedMap:
    if s is None:
        return RootedMap.vertex()
    return RootedMap.from_sigma(s, len(s) - 2)


def brute_force_maps(n: int, limit: int = DEFAULT_LIMIT) -> Iterator[RootedMap]:
    """Every rooted planar map with ``n`` edges, each exactly once."""
    for s in brute_force_sigmas(n, limit):
        yield as_map(s)
