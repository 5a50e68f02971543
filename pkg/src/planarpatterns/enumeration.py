"""Exact enumeration of rooted planar maps, plain and with marked faces.

The map series ``M(z,u,x)`` solves

    M = 1 + z u^2 M^2 + z u (u M - M(z,1)) / (u - 1) + sum of marking terms,

where each marking term reads ``(x_j - 1) c z^{e+1} u^{2-h} P_{h-1} prod S_i^{s_i}``.
Coefficients are computed order by order in ``z``.  Marking variables enter
through ``y_j = x_j - 1`` and are truncated at total degree ``K``, so every
stored coefficient is a nonnegative integer.

Internally a polynomial in ``u`` is packed into one big integer, one
``B``-bit digit per power of ``u``; products of whole blocks of such rows
are single big-integer multiplications arranged as an online
divide-and-conquer convolution.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate, combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .generate import DEFAULT_LIMIT, brute_force_maps, brute_force_sigmas  # noqa: F401
from .maps import RootedMap, face_class_key, is_simple_face
from .series import TruncatedSeries

try:  # gmpy2 multiplies large integers much faster than CPython
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int


class EnumerationError(ValueError):
    pass


@lru_cache(maxsize=None)
def tutte_count(n: int) -> int:
    """Number of rooted planar maps with ``n`` edges: 2*3^n*(2n)!/((n+2)! n!)."""
    if n < 0:
        raise EnumerationError("n must be nonnegative")
    return 2 * 3 ** n * math.factorial(2 * n) // (math.factorial(n + 2) * math.factorial(n))


# ---------------------------------------------------------------------------
# marking terms and jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarkingTerm:
    """``(x_var - 1) * c * z^(e+1) * u^(2-h) * P_{h-1} * prod_i S_i^(s[i-1])``.

    ``u_power`` replaces the exponent ``2 - h`` of ``u`` when given; it is
    there to evaluate equations written with a different power of ``u``.
    """
    var: int
    c: int
    e: int
    h: int
    s: tuple = ()
    u_power: int | None = None

    def __post_init__(self):
        if self.h < 1:
            raise EnumerationError("marking term needs a cycle length h >= 1")
        if self.c < 0 or self.e < 0 or any(x < 0 for x in self.s):
            raise EnumerationError("marking term exponents must be nonnegative")

    @property
    def upow(self) -> int:
        return 2 - self.h if self.u_power is None else self.u_power

    @property
    def s_factors(self) -> tuple:
        out = []
        for i, cnt in enumerate(self.s):
            out.extend([i + 1] * cnt)
        return tuple(out)


class Jets:
    """Monomials y^a of total degree <= K in r variables."""

    def __init__(self, r: int, K: int):
        self.r, self.K = r, K
        mons = [(0,) * r]
        for d in range(1, K + 1):
            for combo in combinations_with_replacement(range(r), d):
                a = [0] * r
                for i in combo:
                    a[i] += 1
                mons.append(tuple(a))
        self.monomials = mons
        self.index = {a: i for i, a in enumerate(mons)}
        self.degree = [sum(a) for a in mons]
        self.pairs = []
        for i, a in enumerate(mons):
            for j, b in enumerate(mons):
                if self.degree[i] + self.degree[j] <= K:
                    self.pairs.append((i, j, self.index[tuple(x + y for x, y in zip(a, b))]))
        self.unit = []
        for v in range(r):
            table = {}
            for i, a in enumerate(mons):
                if self.degree[i] < K:
                    b = list(a)
                    b[v] += 1
                    table[i] = self.index[tuple(b)]
            self.unit.append(table)

    def mul(self, x: dict, y: dict) -> dict:
        out = {}
        for i, j, k in self.pairs:
            a = x.get(i)
            if a:
                b = y.get(j)
                if b:
                    out[k] = out.get(k, 0) + a * b
        return out


def _add_into(acc: dict, x: dict, scale: int = 1):
    for k, v in x.items():
        acc[k] = acc.get(k, 0) + scale * v


# ---------------------------------------------------------------------------
# packed rows and online convolution
# ---------------------------------------------------------------------------

class _Packer:
    def __init__(self, bits: int):
        self.B = bits
        self.Bb = bits // 8

    def pack(self, digits: Sequence[int]) -> int:
        Bb = self.Bb
        return int.from_bytes(b"".join(int(d).to_bytes(Bb, "little") for d in digits), "little")

    def unpack(self, x: int, length: int) -> list[int]:
        if x < 0:
            raise EnumerationError("negative packed row; digit bound violated")
        Bb = self.Bb
        raw = int(x).to_bytes(length * Bb, "little")
        return [int.from_bytes(raw[i * Bb:(i + 1) * Bb], "little") for i in range(length)]


class _OnlineSquare:
    """C[t] = sum_{a+b=t} A[a] A[b] for jet-valued packed rows filled online.

    Rows may carry signed digits; the product digits are recovered from the
    two's complement bytes by a borrow correction at both ends of each row.
    """

    def __init__(self, A: list, deg, jets: Jets, packer: _Packer, N: int):
        self.A = A
        self.deg = deg
        self.jets = jets
        self.packer = packer
        self.N = N
        self.C = [dict() for _ in range(N + 1)]
        self.done = [False] * (N + 1)
        pairs = [(i, j, k) for i, j, k in jets.pairs if i <= j]
        self.sym_pairs = pairs
        cross = [(i, j, k) for i, j, k in pairs if i < j]
        diag_needed = {i for i, j, _ in pairs if i == j} | {i for i, j, _ in cross} | {j for i, j, _ in cross}
        # Karatsuba for the cross terms pays off when it saves products
        self.karatsuba = len(diag_needed) + len(cross) < 2 * len(cross) + sum(1 for i, j, _ in pairs if i == j)
        self.diag_needed = sorted(diag_needed)

    def _pack_block(self, lo, hi, stride):
        Bb = self.packer.Bb
        width = stride * Bb
        zero = b"\0" * width
        per_jet = {}
        for idx in range(lo, hi):
            for a, v in self.A[idx].items():
                if v:
                    per_jet.setdefault(a, {})[idx - lo] = v
        out = {}
        for a, rows in per_jet.items():
            pos, neg = [], []
            any_neg = False
            for t in range(hi - lo):
                v = rows.get(t, 0)
                if v > 0:
                    pos.append(v.to_bytes(width, "little"))
                    neg.append(zero)
                elif v < 0:
                    any_neg = True
                    pos.append(zero)
                    neg.append((-v).to_bytes(width, "little"))
                else:
                    pos.append(zero)
                    neg.append(zero)
            x = int.from_bytes(b"".join(pos), "little")
            if any_neg:
                x -= int.from_bytes(b"".join(neg), "little")
            out[a] = _big(x)
        return out

    def _products(self, XA, XB, same):
        """Yield (target jet, product, factor)."""
        if same:
            for i, j, k in self.sym_pairs:
                x, y = XA.get(i), XA.get(j)
                if x is not None and y is not None:
                    yield k, x * y, (1 if i == j else 2)
            return
        if not self.karatsuba:
            for i, j, k in self.jets.pairs:
                x, y = XA.get(i), XB.get(j)
                if x is not None and y is not None:
                    yield k, x * y, 2
            return
        D = {}
        for i in self.diag_needed:
            x, y = XA.get(i), XB.get(i)
            D[i] = x * y if (x is not None and y is not None) else 0
        for i, j, k in self.sym_pairs:
            if i == j:
                if D[i]:
                    yield k, D[i], 2
                continue
            xi, xj, yi, yj = XA.get(i, 0), XA.get(j, 0), XB.get(i, 0), XB.get(j, 0)
            if (xi or xj) and (yi or yj):
                yield k, (xi + xj) * (yi + yj) - D[i] - D[j], 2

    def _mul_blocks(self, lo1, hi1, lo2, hi2, t_lo, t_hi, same=None):
        """Add the pairs of A[lo1:hi1] x A[lo2:hi2] landing in C[t_lo:t_hi].

        Operands are split while most of their full product would fall
        outside the wanted target rows.
        """
        N = self.N
        hi1, hi2, t_hi = min(hi1, N + 1), min(hi2, N + 1), min(t_hi, N + 1)
        if lo1 >= hi1 or lo2 >= hi2 or t_lo >= t_hi:
            return
        if same is None:
            same = (lo1 == lo2 and hi1 == hi2)
        p_lo, p_hi = lo1 + lo2, hi1 + hi2 - 1
        useful = min(p_hi, t_hi) - max(p_lo, t_lo)
        if useful <= 0:
            return
        n1, n2 = hi1 - lo1, hi2 - lo2
        if p_hi - p_lo > 2 * useful and max(n1, n2) > 4:
            if same:
                m = (lo1 + hi1) // 2
                self._mul_blocks(lo1, m, lo1, m, t_lo, t_hi, True)
                self._mul_blocks(m, hi1, m, hi1, t_lo, t_hi, True)
                self._mul_blocks(lo1, m, m, hi1, t_lo, t_hi, False)
            elif n1 >= n2:
                m = (lo1 + hi1) // 2
                self._mul_blocks(lo1, m, lo2, hi2, t_lo, t_hi, False)
                self._mul_blocks(m, hi1, lo2, hi2, t_lo, t_hi, False)
            else:
                m = (lo2 + hi2) // 2
                self._mul_blocks(lo1, hi1, lo2, m, t_lo, t_hi, False)
                self._mul_blocks(lo1, hi1, m, hi2, t_lo, t_hi, False)
            return
        self._direct(lo1, hi1, lo2, hi2, t_lo, t_hi, same)

    def _direct(self, lo1, hi1, lo2, hi2, t_lo, t_hi, same):
        stride = max(self.deg(i) for i in range(lo1, hi1)) + max(self.deg(i) for i in range(lo2, hi2)) + 1
        XA = self._pack_block(lo1, hi1, stride)
        XB = XA if same else self._pack_block(lo2, hi2, stride)
        Bb = self.packer.Bb
        width = stride * Bb
        span = stride * self.packer.B
        nrows = (hi1 - lo1) + (hi2 - lo2) - 1
        for k, prod, factor in self._products(XA, XB, same):
            prod = int(prod)
            if not prod:
                continue
            raw = prod.to_bytes(nrows * width + Bb, "little", signed=True)
            for t in range(t_lo, t_hi):
                off = t - lo1 - lo2
                if off < 0 or off >= nrows:
                    continue
                a = off * width
                v = int.from_bytes(raw[a:a + width], "little")
                if raw[a + width - 1] & 0x80:
                    v -= 1 << span
                if a and raw[a - 1] & 0x80:
                    v += 1
                if v:
                    ct = self.C[t]
                    ct[k] = ct.get(k, 0) + factor * v

    def block(self, l, mid, r):
        if l == 0:
            self._mul_blocks(0, mid, 0, mid, mid, r)
        else:
            self._mul_blocks(l, mid, 0, r - l, mid, r)

    def finish(self, t):
        """Add the pairs (0, t) and (t, 0); needs A[t]."""
        if self.done[t]:
            return self.C[t]
        jets = self.jets
        if t == 0:
            _add_into(self.C[0], jets.mul(self.A[0], self.A[0]))
        else:
            _add_into(self.C[t], jets.mul(self.A[0], self.A[t]), 2)
        self.done[t] = True
        return self.C[t]


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------

@dataclass
class SeriesFamily:
    """Solution of a (possibly marked) map equation up to ``z^N``.

    ``rows[n][a]`` lists the coefficients of ``u^0..u^{2n}`` of ``[z^n y^a] M``
    where ``a`` indexes ``jets.monomials``; ``M1[n][a]`` is their sum.
    ``S[l][n][a]`` is ``[z^n y^a] S_l``.  ``P_l = M alpha_l + beta_l`` where
    ``alpha[l][n][i][a]`` and ``beta[l][n][i][a]`` hold ``[z^n u^i y^a]``.
    """
    N: int
    K: int
    r: int
    terms: tuple
    jets: Jets
    rows: list
    M1: list
    S: dict
    alpha: dict
    beta: dict
    meta: dict = field(default_factory=dict)

    # -- views as TruncatedSeries ----------------------------------------
    def _jet_key(self, a: int) -> tuple:
        return self.jets.monomials[a]

    @property
    def M(self) -> TruncatedSeries:
        c = {}
        for n, row in enumerate(self.rows):
            for a, digits in row.items():
                k = self._jet_key(a)
                for j, v in enumerate(digits):
                    if v:
                        c[(n, j, k)] = v
        return TruncatedSeries(c, self.N, self.r, self.K)

    @property
    def M_at_1(self) -> TruncatedSeries:
        c = {(n, 0, self._jet_key(a)): v for n, row in enumerate(self.M1) for a, v in row.items()}
        return TruncatedSeries(c, self.N, self.r, self.K)

    def m_series(self, i: int) -> TruncatedSeries:
        """[u^i] M as a series in z (and y)."""
        c = {}
        for n, row in enumerate(self.rows):
            for a, digits in row.items():
                if i < len(digits) and digits[i]:
                    c[(n, 0, self._jet_key(a))] = digits[i]
        return TruncatedSeries(c, self.N, self.r, self.K)

    def S_series(self, l: int) -> TruncatedSeries:
        if l not in self.S:
            raise EnumerationError(f"S_{l} was not computed")
        c = {(n, 0, self._jet_key(a)): v for n, row in enumerate(self.S[l]) for a, v in row.items()}
        return TruncatedSeries(c, self.N, self.r, self.K)

    def _upoly_series(self, seq) -> TruncatedSeries:
        c = {}
        for n, poly in enumerate(seq):
            for i, d in enumerate(poly):
                for a, v in d.items():
                    if v:
                        c[(n, i, self._jet_key(a))] = v
        return TruncatedSeries(c, self.N, self.r, self.K)

    def P_series(self, l: int) -> TruncatedSeries:
        """P_l(z,u); built from ``M alpha_l + beta_l`` with exact series products."""
        if l == 0:
            return self.M
        if l not in self.alpha:
            raise EnumerationError(f"P_{l} was not computed")
        return self.M * self._upoly_series(self.alpha[l]) + self._upoly_series(self.beta[l])

    # -- counts -------------------------------------------------------------
    def count(self, n: int, k: tuple | int = 0) -> int:
        """[z^n y^k] M(z,1,1+y)."""
        if isinstance(k, int):
            k = (k,) if self.r == 1 else (0,) * self.r
        a = self.jets.index.get(tuple(k))
        if a is None or n > self.N:
            raise EnumerationError("query outside truncation")
        return self.M1[n].get(a, 0)

    def valency_counts(self, n: int) -> list[int]:
        return list(self.rows[n].get(0, [0]))


def _needed_indices(terms: Sequence[MarkingTerm], P_count: int, S_count: int):
    pmax = max([t.h - 1 for t in terms] + [P_count])
    smax = max([len(t.s) for t in terms] + [S_count])
    return pmax, smax


def digit_bits(N: int, K: int, L: int) -> int:
    """Bits per packed coefficient; bounds every intermediate coefficient."""
    bits = (N + 2) * math.log2(12) + K * math.log2(2 * N + 4) + (L + 3) * math.log2(N + 4) + 128
    return int(math.ceil(bits / 64.0)) * 64


def solve_marked_dde(terms: Iterable[MarkingTerm], N: int, K: int = 4, x_arity: int | None = None,
                     P_count: int = 0, S_count: int = 0) -> SeriesFamily:
    """Solve the marked map equation to order ``z^N`` and ``(x-1)``-degree ``K``.

    ``P_count``/``S_count`` ask for ``P_l``/``S_l`` beyond what the terms need.
    """
    terms = tuple(terms)
    if N < 0:
        raise EnumerationError("N must be nonnegative")
    if x_arity is None:
        x_arity = max((t.var + 1 for t in terms), default=0)
    if any(t.var >= x_arity for t in terms):
        raise EnumerationError("marking term refers to a missing variable")
    if x_arity == 0:
        K = 0
    jets = Jets(x_arity, K)
    pmax, smax = _needed_indices(terms, P_count, S_count)
    qdeg = max(pmax, smax)          # low u-coefficients of powers of M that are needed
    qpow = qdeg                     # M^1 .. M^qpow
    B = digit_bits(N, K, qdeg + 1)
    pk = _Packer(B)
    mul = jets.mul

    Mp: list = [None] * (N + 1)           # packed rows of M
    rows: list = [None] * (N + 1)         # decoded rows of M
    M1: list = [None] * (N + 1)
    mlow: list = [None] * (N + 1)         # mlow[n][i]: jets of [z^n u^i] M, i <= qdeg
    T = {k: [None] * (N + 1) for k in range(1, qpow)}   # T[k][n][i]: [z^n u^i] M^{k+1}
    S = {l: [None] * (N + 1) for l in range(1, smax + 1)}
    alpha = {l: [None] * (N + 1) for l in range(0, pmax + 1)}
    beta = {l: [None] * (N + 1) for l in range(0, pmax + 1)}

    def Qval(k, j, n):
        """[z^n u^j] M^{k+1}."""
        if n < 0:
            return {}
        return mlow[n][j] if k == 0 else T[k][n][j]

    groups = {}     # (h-1, s_factors) -> (G, H): alpha_{h-1} W and beta_{h-1} W
    for t in terms:
        key = (t.h - 1, t.s_factors)
        if key not in groups:
            groups[key] = ([None] * (N + 1), [None] * (N + 1))
    # With R = sum_t c_t y_t z^{e_t} u^{D+p_t} G_t, p_t the power of u, and V = 2u^{D+2} M + R,
    #   z u^2 M^2 + z u^{-D} M R = z u^{-2D-2} (V^2 - R^2) / 4,
    # so one online square carries both the quadratic and the marking part.
    D = max([-t.upow for t in terms] + [0])
    if terms:
        Vp: list = [None] * (N + 1)
        Rp: list = [None] * (N + 1)
        rdeg = max(D + t.upow + t.h - 1 for t in terms)     # u-degree of R
        V2 = _OnlineSquare(Vp, lambda i: max(2 * i + D + 2, rdeg), jets, pk, N)
        R2 = _OnlineSquare(Rp, lambda i: rdeg, jets, pk, N)
        convs = [V2, R2]
    else:
        Vp = Mp
        V2 = _OnlineSquare(Mp, lambda i: 2 * i, jets, pk, N)
        convs = [V2]
    Wseq = {sf: [None] * (N + 1) for (_l, sf) in groups}
    partial = {}

    def w_at(sf, n):
        if not sf:
            return {0: 1} if n == 0 else {}
        if len(sf) == 1:
            return S[sf[0]][n]
        head = sf[:-1]
        store = partial.setdefault(head, [None] * (N + 1))
        if store[n] is None:
            store[n] = w_at(head, n)
        out = {}
        last = S[sf[-1]]
        for a in range(n + 1):
            x = store[a]
            y = last[n - a]
            if x and y:
                _add_into(out, mul(x, y))
        return out

    def upoly_times_scalar_conv(pseq, qfun, n, length, shift, acc):
        """acc[i + shift] -= sum_{a+b=n, b>=1} pseq[a][i] * q(b)."""
        for b in range(1, n + 1):
            q = qfun(b)
            if not q:
                continue
            poly = pseq[n - b]
            for i, d in enumerate(poly):
                if d:
                    _add_into(acc[i + shift], mul(d, q), -1)

    def leaf(n):
        if n == 0:
            Mp[0] = {0: 1}
            rows[0] = {0: [1]}
        else:
            rhs = {}
            if terms:
                top = dict(V2.C[n - 1])
                _add_into(top, R2.C[n - 1], -1)
                for t in terms:
                    src = n - t.e - 1
                    if src < 0:
                        continue
                    H = groups[(t.h - 1, t.s_factors)][1][src]
                    unit = jets.unit[t.var]
                    sh = 2 * D + 2 + t.upow
                    for a, coeffs in H.items():
                        b = unit.get(a)
                        if b is not None:
                            v = sum(x << (B * (j + sh)) for j, x in enumerate(coeffs) if x)
                            top[b] = top.get(b, 0) + 4 * t.c * v
                rhs = {}
                for a, v in top.items():
                    q, rem = divmod(v, 4)
                    if rem or (q & ((1 << (B * (2 * D + 2))) - 1)):
                        raise EnumerationError("inexact division; digit bound violated")
                    rhs[a] = q >> (B * (2 * D + 2))
            else:
                rhs = {a: v << (2 * B) for a, v in V2.C[n - 1].items()}
            for a, digits in rows[n - 1].items():
                suffix = list(accumulate(reversed(digits)))
                suffix.reverse()        # suffix[k] = sum_{i>=k} digits[i]; goes to u^{k+1}
                rhs[a] = rhs.get(a, 0) + (pk.pack(suffix) << B)
            rhs = {a: v for a, v in rhs.items() if v}
            Mp[n] = rhs
            rows[n] = {a: pk.unpack(v, 2 * n + 1) for a, v in rhs.items()}
        M1[n] = {a: sum(d) for a, d in rows[n].items()}
        mlow[n] = [{a: d[i] for a, d in rows[n].items() if i < len(d) and d[i]}
                   for i in range(qdeg + 1)]
        # low u-coefficients of M^{k+1}
        for k in range(1, qpow):
            vals = []
            for i in range(qdeg + 1):
                acc = {}
                for a in range(n + 1):
                    left = mlow[a] if k == 1 else T[k - 1][a]
                    right = mlow[n - a]
                    for s in range(i + 1):
                        x = left[s]
                        if x:
                            y = right[i - s]
                            if y:
                                _add_into(acc, mul(x, y))
                vals.append(acc)
            T[k][n] = vals
        # S_l = m_l - sum_{k=1}^{l-1} S_k [u^{l-k}] M^k - z [u^{l-2}] M^2
        for l in range(1, smax + 1):
            acc = dict(mlow[n][l])
            for k in range(1, l):
                for a in range(1, n + 1):
                    x = S[k][a]
                    if x:
                        y = Qval(k - 1, l - k, n - a)
                        if y:
                            _add_into(acc, mul(x, y), -1)
            if l >= 2 and n >= 1:
                y = T[1][n - 1][l - 2] if 1 in T else _square_low(mlow, n - 1, l - 2, jets)
                _add_into(acc, y, -1)
            S[l][n] = {a: v for a, v in acc.items() if v}
            if any(v < 0 for v in S[l][n].values()):
                raise EnumerationError("negative S coefficient; digit bound violated")
        # P_l = M alpha_l + beta_l
        for l in range(pmax + 1):
            al = [{} for _ in range(l + 1)]
            be = [{} for _ in range(max(l, 1))]
            if n == 0:
                al[0] = {0: 1}
            for k in range(l):
                for a, v in mlow[n][k].items():
                    be[k][a] = be[k].get(a, 0) - v
                upoly_times_scalar_conv(alpha[k], lambda b: Qval(k, l - k, b), n, k + 1, l - k, al)
                upoly_times_scalar_conv(beta[k], lambda b: Qval(k, l - k, b), n, k, l - k, be)
            alpha[l][n] = [{a: v for a, v in d.items() if v} for d in al]
            beta[l][n] = [{a: v for a, v in d.items() if v} for d in be]
        for sf, seq in Wseq.items():
            seq[n] = w_at(sf, n)
        for (l, sf), (G, H) in groups.items():
            W = Wseq[sf]
            g = {}
            hh = {}
            for b in range(n + 1):
                w = W[b]
                if not w:
                    continue
                for target, src, width in ((g, alpha[l][n - b], l + 1), (hh, beta[l][n - b], l + 1)):
                    for i, d in enumerate(src):
                        if not d:
                            continue
                        for a, v in mul(d, w).items():
                            lst = target.get(a)
                            if lst is None:
                                lst = target[a] = [0] * width
                            lst[i] += v
            G[n] = {a: c for a, c in g.items() if any(c)}
            H[n] = {a: c for a, c in hh.items() if any(c)}
        if terms:
            R = {}
            for t in terms:
                src = n - t.e
                if src < 0:
                    continue
                G = groups[(t.h - 1, t.s_factors)][0][src]
                unit = jets.unit[t.var]
                sh = D + t.upow
                for a, coeffs in G.items():
                    b = unit.get(a)
                    if b is not None:
                        R[b] = R.get(b, 0) + t.c * sum(x << (B * (j + sh)) for j, x in enumerate(coeffs) if x)
            Rp[n] = {a: v for a, v in R.items() if v}
            V = {a: v << (B * (D + 2) + 1) for a, v in Mp[n].items()}
            _add_into(V, Rp[n])
            Vp[n] = {a: v for a, v in V.items() if v}
            R2.finish(n)
        V2.finish(n)

    size = 1
    while size < N + 1:
        size *= 2

    def solve(l, r):
        if l > N:
            return
        if r - l == 1:
            leaf(l)
            return
        mid = (l + r) // 2
        solve(l, mid)
        if mid <= N:
            for conv in convs:
                conv.block(l, mid, r)
        solve(mid, r)

    solve(0, size)
    return SeriesFamily(N, K, x_arity, terms, jets, rows, M1, S, alpha, beta,
                        meta={"digit_bits": B})


def _square_low(mlow, n, i, jets):
    acc = {}
    for a in range(n + 1):
        for s in range(i + 1):
            x = mlow[a][s]
            y = mlow[n - a][i - s]
            if x and y:
                _add_into(acc, jets.mul(x, y))
    return acc


def solve_map_dde(N: int, P_count: int = 0, S_count: int = 0) -> SeriesFamily:
    """Unmarked map series to order ``z^N``."""
    return solve_marked_dde((), N, K=0, x_arity=0, P_count=P_count, S_count=S_count)


# ---------------------------------------------------------------------------
# moments and count tables
# ---------------------------------------------------------------------------

def factorial_moment_exact(family: SeriesFamily, n: int, k) -> Fraction:
    """E[(X_n)_k] for the marked counts in a uniform n-edge map (mixed, multi-index k)."""
    if isinstance(k, int):
        k = (k,) if family.r == 1 else (0,) * family.r
    k = tuple(k)
    if sum(k) > family.K or n > family.N:
        raise EnumerationError("moment outside truncation")
    total = family.count(n, (0,) * family.r)
    c = family.count(n, k)
    w = 1
    for ki in k:
        w *= math.factorial(ki)
    return Fraction(c * w, total)


@dataclass
class CountTable:
    m_by_valency: dict
    m_by_marks: dict

    @classmethod
    def from_family(cls, fam: SeriesFamily, with_marks: bool = True) -> "CountTable":
        byv = {}
        for n in range(fam.N + 1):
            for j, v in enumerate(fam.valency_counts(n)):
                if v:
                    byv[(n, j)] = v
        bym = {}
        if with_marks and fam.r:
            # convert (x-1)-jets back to x-multiplicity counts only for one variable
            for n in range(fam.N + 1):
                for a, v in fam.M1[n].items():
                    bym[(n,) + fam.jets.monomials[a]] = v
        return cls(byv, bym)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "j", "count"])
        for (n, j), v in sorted(self.m_by_valency.items()):
            w.writerow([n, j, v])
        if self.m_by_marks:
            r = len(next(iter(self.m_by_marks))) - 1
            w.writerow([])
            w.writerow(["n"] + [f"k{i + 1}" for i in range(r)] + ["count"])
            for key, v in sorted(self.m_by_marks.items()):
                w.writerow(list(key) + [v])
        return out.getvalue()


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

def marked_face_counts(m: RootedMap, classes: dict) -> tuple:
    """Number of non-root faces of ``m`` in each face class.

    ``classes`` maps a face-class key (see :func:`maps.face_class_key`) to a
    variable index.
    """
    r = max(classes.values(), default=-1) + 1
    out = [0] * r
    if m.root is None:
        return tuple(out)
    root_face = set(m.root_face())
    for f in m.faces():
        if f[0] in root_face:
            continue
        key = face_class_key(m, f[0])
        v = classes.get(key)
        if v is not None:
            out[v] += 1
    return tuple(out)


def brute_force_mark_table(n: int, classes: dict) -> dict:
    """Map (k_1..k_r) -> number of n-edge maps with those marked-face counts."""
    table = {}
    for m in brute_force_maps(n):
        key = marked_face_counts(m, classes)
        table[key] = table.get(key, 0) + 1
    return table


def simple_polygon_count(m: RootedMap, k: int) -> int:
    """Non-root faces of ``m`` that are simple k-gons."""
    if m.root is None:
        return 0
    rf = set(m.root_face())
    return sum(1 for f in m.faces() if f[0] not in rf and len(f) == k and is_simple_face(m, f[0]))
