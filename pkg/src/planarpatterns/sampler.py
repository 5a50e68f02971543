"""Uniform random rooted planar maps by the recursive method.

A map with ``n`` edges and root face degree ``j`` either has a bridge as root
edge (two smaller maps, degrees ``j1 + j2 = j - 2``) or is obtained from a map
with ``n - 1`` edges and root degree ``k >= j - 1`` by adding a root edge
inside its root face.  Choosing among these cases with probabilities
proportional to exact counts and rebuilding bottom-up gives uniform maps.

Two kinds of tables are offered.  Exact tables hold integers from the series
solver and sample without bias.  Float tables hold ``m_{n,j} / 12^n`` in
double precision and truncate the root degree at ``j_max``; they reach
thousands of edges at a relative weight error around ``1e-12``.
"""

from __future__ import annotations

import csv
import io
import json
import itertools
import math
import os
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy import stats

from .enumeration import solve_map_dde, tutte_count
from .maps import Pattern, RootedMap, count_occurrences

EXACT_LIMIT = 400          # default switch from exact to float tables
MIN_J_MAX = 320
CHUNK = 250                # trials per independently seeded chunk
THREADS_ENV = "PLANARPATTERNS_THREADS"


def default_j_max(n_max: int) -> int:
    """Root-degree cutoff for float tables.

    Cutting the degree loses weight that comes back through the chord step
    many edges later.  Measured row-sum loss with j_max = f n: about 1e-6 at
    f = 0.5 and 1e-13 at f = 0.7 for n = 600; 0.75 n keeps every row within
    1e-12 from n = 400 to 2000.
    """
    return min(2 * n_max, max(MIN_J_MAX, math.ceil(0.75 * n_max)))


class SamplerError(ValueError):
    pass


def make_rng(seed: int | None) -> np.random.Generator:
    """Counter-based generator; the same seed gives the same stream."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class SamplerTables:
    """Weights of the decomposition cases for every (n, j) up to ``n_max``.

    ``m[n][j]`` counts maps (exact) or ``m_{n,j}/12^n`` (float); ``bridge``
    is the part of it whose root edge is a bridge, on the same scale.
    ``cum`` holds prefix sums of each row (exact) or suffix sums in reverse
    order, ``cum[n][i] = sum_{k >= j_max - i} m[n][k]`` (float).
    """
    n_max: int
    exact: bool
    j_max: int
    m: object
    bridge: object
    cum: object = None

    def total(self, n: int):
        return sum(self.m[n]) if self.exact else float(self.m[n].sum())

    def check_row_sums(self) -> bool:
        """Rows sum to tutte_count(n) (exact) or to it up to rounding (float)."""
        for n in range(self.n_max + 1):
            if self.exact:
                if sum(self.m[n]) != tutte_count(n):
                    return False
            else:
                ref = tutte_count(n) / 12.0 ** n if n < 280 else math.exp(
                    math.log(tutte_count(n)) - n * math.log(12))
                if abs(self.m[n].sum() / ref - 1) > 1e-9:
                    return False
        return True


def _exact_tables(n_max: int) -> SamplerTables:
    fam = solve_map_dde(n_max)
    m = [list(fam.valency_counts(n)) for n in range(n_max + 1)]
    bridge = [[0] * len(m[n]) for n in range(n_max + 1)]
    for n in range(1, n_max + 1):
        prev = m[n - 1]
        suffix = [0] * (len(prev) + 1)
        for k in range(len(prev) - 1, -1, -1):
            suffix[k] = suffix[k + 1] + prev[k]
        for j in range(len(m[n])):
            chord = suffix[j - 1] if 1 <= j <= len(prev) else 0
            bridge[n][j] = m[n][j] - chord
            if bridge[n][j] < 0:
                raise SamplerError("inconsistent count table")
    cum = [list(itertools.accumulate(row)) for row in m]
    return SamplerTables(n_max, True, 2 * n_max, m, bridge, cum)


# Coefficients decay like (5/6)^j in the root degree.  The FFT works on
# u -> U_SCALE u (the radius 6/5), where they are of comparable size, so rounding stays
# relative; unscaled, the chord step would amplify absolute noise at large j.
U_SCALE = 1.2


def _float_tables(n_max: int, j_max: int) -> SamplerTables:
    J = j_max
    L = sfft.next_fast_len(2 * J + 2, real=True)
    up = U_SCALE ** np.arange(J + 1)
    R = np.zeros((n_max + 1, J + 1))
    B = np.zeros((n_max + 1, J + 1))
    H = np.zeros((n_max + 1, L // 2 + 1), dtype=complex)
    R[0, 0] = 1.0
    H[0] = sfft.rfft(R[0], L)
    for n in range(1, n_max + 1):
        # [z^{n-1}] M^2 evaluated at the L-th roots of unity
        acc = np.einsum("ij,ij->j", H[:n], H[n - 1::-1])
        sq = sfft.irfft(acc, L)[:J - 1] / up[:J - 1]
        np.maximum(sq, 0.0, out=sq)
        B[n, 2:] = sq / 12.0
        suffix = np.cumsum(R[n - 1, ::-1])[::-1]          # suffix[k] = sum_{k' >= k}
        R[n, 1:] = suffix[:J] / 12.0
        R[n] += B[n]
        R[n, min(J, 2 * n) + 1:] = 0.0
        H[n] = sfft.rfft(R[n] * up, L)
    # suffix sums read backwards (ascending): a tail sum is stored directly
    # instead of as a difference of prefix sums, which cancels once the tail
    # is below 1e-16 of the row
    cum = np.ascontiguousarray(np.cumsum(R[:, ::-1], axis=1))
    return SamplerTables(n_max, False, J, R, B, cum)


def build_sampler_tables(n_max: int, exact: bool | None = None,
                         j_max: int | None = None) -> SamplerTables:
    """Decomposition weights up to ``n_max`` edges.

    ``exact=None`` picks exact integers up to ``EXACT_LIMIT`` and floats
    beyond.
    """
    if n_max < 0:
        raise SamplerError("n_max must be nonnegative")
    if exact is None:
        exact = n_max <= EXACT_LIMIT
    if exact:
        return _exact_tables(n_max)
    if j_max is None:
        j_max = default_j_max(n_max)
    if j_max < 4:
        raise SamplerError("j_max too small")
    return _float_tables(n_max, j_max)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) by rejection on random bytes."""
    if bound <= 0:
        raise SamplerError("empty range")
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    extra = 8 * nbytes - bits
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "little") >> extra
        if r < bound:
            return r


class _Planner:
    """Top-down choice of decomposition cases, as a pre-order op list."""

    def __init__(self, tables: SamplerTables, rng: np.random.Generator):
        self.t = tables
        self.rng = rng

    def root_degree(self, n: int) -> int:
        t = self.t
        if t.exact:
            return bisect_right(t.cum[n], _randbelow(self.rng, t.cum[n][-1]))
        return self._from_tail(n, 0)

    def _from_tail(self, n: int, lo: int) -> int:
        """Degree k >= lo with probability proportional to m[n][k] (float tables)."""
        t = self.t
        rev = t.cum[n]
        x = self.rng.random() * rev[t.j_max - lo]
        # rev is ascending; k is the last degree whose tail sum still exceeds x
        return t.j_max - int(np.searchsorted(rev, x, side="right"))

    def is_bridge(self, n: int, j: int) -> bool:
        t = self.t
        if t.exact:
            return _randbelow(self.rng, t.m[n][j]) < t.bridge[n][j]
        return self.rng.random() * t.m[n, j] < t.bridge[n, j]

    def chord_child(self, n: int, j: int) -> int:
        t = self.t
        if t.exact:
            row = t.cum[n - 1]
            lo = row[j - 2] if j >= 2 else 0
            return bisect_right(row, lo + _randbelow(self.rng, row[-1] - lo))
        k = self._from_tail(n - 1, max(j - 1, 0))
        return min(max(k, j - 1), t.j_max)

    def bridge_split(self, n: int, j: int) -> tuple[int, int]:
        t = self.t
        if t.exact:
            r = _randbelow(self.rng, t.bridge[n][j])
            for a in _interleaved(n).tolist():
                ra, rb = t.m[a], t.m[n - 1 - a]
                for j1 in range(max(0, j - 1 - len(rb)), min(j - 2, len(ra) - 1) + 1):
                    w = ra[j1] * rb[j - 2 - j1]
                    if r < w:
                        return a, j1
                    r -= w
            raise SamplerError("bridge weights do not add up")  # pragma: no cover
        # Sizes are scanned from both ends inward (a = 0, n-1, 1, n-2, ...)
        # in growing chunks; the weight sits mostly at the ends.
        R = t.m
        target = self.rng.random() * 12.0 * t.bridge[n, j]
        order = _interleaved(n)
        done, size, acc = 0, 32, 0.0
        cols = np.arange(j - 1)
        sizes, cums = [], []
        while done < n:
            a = order[done:done + size]
            W = R[a[:, None], cols] * R[(n - 1 - a)[:, None], j - 2 - cols]
            c = np.cumsum(W.ravel()) + acc
            if c[-1] > target:
                r, j1 = divmod(int(np.searchsorted(c, target, side="right")), j - 1)
                return int(a[r]), j1
            sizes.append(a)
            cums.append(c)
            acc = c[-1]
            done += size
            size *= 2
        # the table weight and the direct sum differ by rounding and the
        # target fell past the end: redraw against the direct sum
        if acc <= 0:
            raise SamplerError(f"no bridge split for n={n}, j={j}")
        a, c = np.concatenate(sizes), np.concatenate(cums)
        idx = int(np.searchsorted(c, self.rng.random() * acc, side="right"))
        r, j1 = divmod(idx, j - 1)
        return int(a[r]), j1

    def plan(self, n: int, j: int) -> list:
        ops = []
        stack = [(n, j)]
        while stack:
            n, j = stack.pop()
            if n == 0:
                ops.append(("v",))
            elif self.is_bridge(n, j):
                a, j1 = self.bridge_split(n, j)
                ops.append(("b",))
                stack.append((n - 1 - a, j - 2 - j1))
                stack.append((a, j1))
            else:
                k = self.chord_child(n, j)
                ops.append(("c", j, k))
                stack.append((n - 1, k))
        return ops


_ORDERS: dict = {}


def _interleaved(n: int) -> np.ndarray:
    o = _ORDERS.get(n)
    if o is None:
        o = np.empty(n, dtype=np.intp)
        o[0::2] = np.arange((n + 1) // 2)
        o[1::2] = n - 1 - np.arange(n // 2)
        _ORDERS[n] = o
    return o


def _chord(s, j, k):
    """Add a root edge inside the root face (degree k) so the new root degree is j."""
    if s is None:
        return [1, 0]
    n = len(s)
    a, b, r = n, n + 1, n - 2
    i = j - 1
    s.extend((0, 0))
    nxt = s[r]
    if i == 0:
        s[r] = a
        s[a] = b
        s[b] = nxt
    elif i == k:
        s[r] = b
        s[b] = a
        s[a] = nxt
    else:
        d = r ^ 1
        for _ in range(i):
            d = s[d ^ 1]
        s[r] = a
        s[a] = nxt
        c = d ^ 1
        nxt = s[c]
        s[c] = b
        s[b] = nxt
    return s


def _join(s1, s2):
    """Bridge from the root corner of s1 to the root corner of s2."""
    n1 = 0 if s1 is None else len(s1)
    n2 = 0 if s2 is None else len(s2)
    if n1 >= n2:
        s = s1 if s1 is not None else []
        if s2 is not None:
            s.extend(x + n1 for x in s2)
        r1 = n1 - 2 if n1 else None
        r2 = n1 + n2 - 2 if n2 else None
    else:
        s = s2
        s.extend(x + n2 for x in (s1 or ()))
        r1 = n2 + n1 - 2 if n1 else None
        r2 = n2 - 2
    a = n1 + n2
    b = a + 1
    s.extend((a, b))
    if r1 is not None:
        s[a] = s[r1]
        s[r1] = a
    if r2 is not None:
        s[b] = s[r2]
        s[r2] = b
    return s


def _build(ops) -> RootedMap:
    stack = []
    for op in reversed(ops):
        if op[0] == "v":
            stack.append(None)
        elif op[0] == "c":
            stack.append(_chord(stack.pop(), op[1], op[2]))
        else:
            left = stack.pop()
            right = stack.pop()
            stack.append(_join(left, right))
    s = stack.pop()
    if s is None:
        return RootedMap.vertex()
    return RootedMap.from_sigma(s, len(s) - 2)


def sample_uniform_map(n: int, seed: int | None = None, tables: SamplerTables | None = None,
                       rng: np.random.Generator | None = None) -> RootedMap:
    """A uniformly random rooted planar map with ``n`` edges."""
    if n < 0:
        raise SamplerError("n must be nonnegative")
    if tables is None:
        tables = build_sampler_tables(n)
    if n > tables.n_max:
        raise SamplerError(f"n={n} beyond the tables (n_max={tables.n_max})")
    rng = rng if rng is not None else make_rng(seed)
    planner = _Planner(tables, rng)
    if n == 0:
        return RootedMap.vertex()
    return _build(planner.plan(n, planner.root_degree(n)))


# ---------------------------------------------------------------------------
# statistics of pattern counts
# ---------------------------------------------------------------------------

@dataclass
class StatsReport:
    n: int
    trials: int
    pattern: str
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    normality_statistic: float
    normality_pvalue: float
    mean_radius: float
    variance_radius: float
    level: float = 0.99
    counts: list = field(default_factory=list, repr=False)

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.variance / self.trials) if self.trials else float("nan")

    def to_dict(self, with_counts: bool = False) -> dict:
        d = asdict(self)
        if not with_counts:
            d.pop("counts")
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "n", "count"])
        for i, c in enumerate(self.counts):
            w.writerow([i, self.n, c])
        return buf.getvalue()


def summarize_counts(counts, n: int, pattern: str = "", level: float = 0.99) -> StatsReport:
    x = np.asarray(counts, dtype=float)
    T = len(x)
    if T == 0:
        raise SamplerError("zero trials")
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if T > 1 else 0.0
    if var > 0:
        skew = float(stats.skew(x, bias=False)) if T > 2 else 0.0
        kurt = float(stats.kurtosis(x, bias=False)) if T > 3 else 0.0
    else:
        skew = kurt = 0.0
    if T >= 20 and var > 0:
        st, p = stats.normaltest(x)
        st, p = float(st), float(p)
    else:
        st, p = float("nan"), float("nan")
    zq = float(stats.norm.ppf(0.5 + level / 2))
    mean_r = zq * math.sqrt(var / T) if T > 1 else float("inf")
    # variance radius from the asymptotic variance of the sample variance
    m4 = float(((x - mean) ** 4).mean()) if T > 1 else 0.0
    var_r = zq * math.sqrt(max(m4 - var ** 2, 0.0) / T) if T > 1 else float("inf")
    return StatsReport(n, T, pattern, mean, var, skew, kurt, st, p, mean_r, var_r, level,
                       [int(c) for c in counts])


def worker_count() -> int:
    """Worker processes for sampling, from ``PLANARPATTERNS_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise SamplerError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


_WORKER: dict = {}


def _init_worker(tables, pattern):
    _WORKER["tables"] = tables
    _WORKER["pattern"] = pattern


def _count_chunk(n: int, size: int, seed_seq: np.random.SeedSequence,
                 tables=None, pattern=None) -> list[int]:
    tables = tables if tables is not None else _WORKER["tables"]
    pattern = pattern if pattern is not None else _WORKER["pattern"]
    rng = np.random.Generator(np.random.Philox(seed_seq))
    return [count_occurrences(sample_uniform_map(n, tables=tables, rng=rng), pattern)
            for _ in range(size)]


def empirical_stats(pattern: Pattern, n: int, trials: int, seed: int | None = None,
                    tables: SamplerTables | None = None, level: float = 0.99,
                    progress=None, workers: int | None = None) -> StatsReport:
    """Sample ``trials`` maps with ``n`` edges and count ``pattern`` in each.

    Trials run in chunks of ``CHUNK`` with one spawned seed per chunk, so the
    counts depend on ``seed`` only, never on the number of workers.
    """
    if trials <= 0:
        raise SamplerError("zero trials")
    if pattern.map.edge_count > n:
        return summarize_counts([0] * trials, n, pattern.name, level)
    if tables is None:
        tables = build_sampler_tables(n)
    sizes = [min(CHUNK, trials - i) for i in range(0, trials, CHUNK)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = worker_count() if workers is None else max(1, workers)
    counts: list[int] = []
    if workers == 1 or len(sizes) == 1:
        for size, ss in zip(sizes, seqs):
            counts += _count_chunk(n, size, ss, tables, pattern)
            if progress is not None:
                progress(len(counts))
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(tables, pattern)) as pool:
            for part in pool.map(_count_chunk, [n] * len(sizes), sizes, seqs):
                counts += part
                if progress is not None:
                    progress(len(counts))
    return summarize_counts(counts, n, pattern.name, level)
