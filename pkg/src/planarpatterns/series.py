"""Exact truncated power series in z, u and marking variables.

A :class:`TruncatedSeries` is a sparse map ``(n, j, k) -> Fraction`` standing
for the coefficient of ``z^n u^j x^k`` where ``k`` is a multi-exponent.  For
the marked map series the marking variables enter shifted, i.e. ``x^k`` means
``prod (x_i - 1)^{k_i}``; truncating in those powers is what keeps factorial
moments exact.  Arithmetic does not care which reading is used.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping


class SeriesError(ValueError):
    pass


Key = tuple  # (n, j, k)


class TruncatedSeries:
    __slots__ = ("z_order", "x_arity", "x_degree", "_c")

    def __init__(self, coeffs: Mapping | Iterable = (), z_order: int = 0,
                 x_arity: int = 0, x_degree: int = 0):
        self.z_order = z_order
        self.x_arity = x_arity
        self.x_degree = x_degree
        c = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for key, v in items:
            n, j, k = key
            k = tuple(k)
            if len(k) != x_arity:
                raise SeriesError("x multidegree has wrong arity")
            if n > z_order or sum(k) > x_degree:
                continue
            v = Fraction(v)
            if v:
                c[(n, j, k)] = c.get((n, j, k), 0) + v
        self._c = {key: v for key, v in c.items() if v}

    # -- helpers ----------------------------------------------------------
    @classmethod
    def zero(cls, z_order=0, x_arity=0, x_degree=0):
        return cls({}, z_order, x_arity, x_degree)

    @classmethod
    def one(cls, z_order=0, x_arity=0, x_degree=0):
        return cls({(0, 0, (0,) * x_arity): 1}, z_order, x_arity, x_degree)

    @classmethod
    def from_poly(cls, terms: Mapping, z_order=0, x_arity=0, x_degree=0):
        """``terms`` maps (n, j) or (n, j, k) to coefficients."""
        out = {}
        for key, v in terms.items():
            if len(key) == 2:
                key = (key[0], key[1], (0,) * x_arity)
            out[key] = v
        return cls(out, z_order, x_arity, x_degree)

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            raise SeriesError("operand is not a TruncatedSeries")
        if self.x_arity != other.x_arity:
            raise SeriesError("x arity mismatch")

    def _bounds(self, other):
        return min(self.z_order, other.z_order), min(self.x_degree, other.x_degree)

    def items(self):
        return self._c.items()

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.x_arity == other.x_arity and self._c == other._c)

    def __repr__(self):
        return (f"TruncatedSeries(N={self.z_order}, r={self.x_arity}, K={self.x_degree}, "
                f"terms={len(self._c)})")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        N, K = self._bounds(other)
        c = defaultdict(Fraction)
        for src in (self._c, other._c):
            for key, v in src.items():
                c[key] += v
        return TruncatedSeries(c, N, self.x_arity, K)

    def __neg__(self):
        return TruncatedSeries({k: -v for k, v in self._c.items()},
                               self.z_order, self.x_arity, self.x_degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "TruncatedSeries":
        a = Fraction(a)
        return TruncatedSeries({k: a * v for k, v in self._c.items()},
                               self.z_order, self.x_arity, self.x_degree)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        N, K = self._bounds(other)
        c = defaultdict(Fraction)
        right = list(other._c.items())
        for (n1, j1, k1), v1 in self._c.items():
            if n1 > N:
                continue
            d1 = sum(k1)
            for (n2, j2, k2), v2 in right:
                if n1 + n2 > N or d1 + sum(k2) > K:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                c[(n1 + n2, j1 + j2, k)] += v1 * v2
        return TruncatedSeries(c, N, self.x_arity, K)

    __rmul__ = __mul__

    def shift(self, dz: int = 0, du: int = 0, dk: tuple | None = None) -> "TruncatedSeries":
        """Multiply by ``z^dz u^du x^dk``; negative ``du`` must divide exactly."""
        dk = dk or (0,) * self.x_arity
        c = {}
        for (n, j, k), v in self._c.items():
            if j + du < 0:
                raise SeriesError("negative u power after shift")
            c[(n + dz, j + du, tuple(a + b for a, b in zip(k, dk)))] = v
        return TruncatedSeries(c, self.z_order, self.x_arity, self.x_degree)

    def divided_difference_u(self) -> "TruncatedSeries":
        """(F(z,u) - F(z,1)) / (u - 1), exactly.

        For ``F = sum c_j u^j`` the quotient is ``sum_j c_j (1 + u + ... + u^{j-1})``.
        """
        c = defaultdict(Fraction)
        for (n, j, k), v in self._c.items():
            if j < 0:
                raise SeriesError("divided difference needs a polynomial in u")
            for i in range(j):
                c[(n, i, k)] += v
        return TruncatedSeries(c, self.z_order, self.x_arity, self.x_degree)

    def at_u1(self) -> "TruncatedSeries":
        c = defaultdict(Fraction)
        for (n, j, k), v in self._c.items():
            c[(n, 0, k)] += v
        return TruncatedSeries(c, self.z_order, self.x_arity, self.x_degree)

    def u_coefficient(self, j: int) -> "TruncatedSeries":
        """[u^j] F as a series in z and x."""
        return TruncatedSeries({(n, 0, k): v for (n, jj, k), v in self._c.items() if jj == j},
                               self.z_order, self.x_arity, self.x_degree)

    def coeff(self, n: int, j: int, k: tuple | int = ()) -> Fraction:
        if isinstance(k, int):
            if self.x_arity == 1:
                k = (k,)
            elif k == 0:
                k = ()
            else:
                raise SeriesError("integer x-degree needs a single marking variable")
        k = tuple(k) if k else (0,) * self.x_arity
        if len(k) != self.x_arity:
            raise SeriesError("x multidegree has wrong arity")
        if n > self.z_order or n < 0 or sum(k) > self.x_degree:
            raise SeriesError("coefficient outside truncation")
        return self._c.get((n, j, k), Fraction(0))

    def max_u_degree(self, n: int) -> int:
        return max((j for (nn, j, _k) in self._c if nn == n), default=-1)

    # -- text format ------------------------------------------------------
    def dumps(self) -> str:
        lines = [f"# z_order={self.z_order} x_arity={self.x_arity} x_degree={self.x_degree}"]
        for (n, j, k), v in sorted(self._c.items()):
            ks = ",".join(map(str, k)) if k else "-"
            lines.append(f"{n} {j} {ks} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TruncatedSeries":
        header = {}
        c = {}
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln:
                continue
            if ln.startswith("#"):
                for tok in ln[1:].split():
                    key, _, val = tok.partition("=")
                    header[key] = int(val)
                continue
            parts = ln.split()
            if len(parts) != 4:
                raise SeriesError(f"bad series line {ln!r}")
            n, j = int(parts[0]), int(parts[1])
            k = () if parts[2] == "-" else tuple(int(t) for t in parts[2].split(","))
            c[(n, j, k)] = Fraction(parts[3])
        r = header.get("x_arity", len(next(iter(c))[2]) if c else 0)
        N = header.get("z_order", max((key[0] for key in c), default=0))
        K = header.get("x_degree", max((sum(key[2]) for key in c), default=0))
        return cls(c, N, r, K)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def divided_difference_u(F: TruncatedSeries) -> TruncatedSeries:
    return F.divided_difference_u()


def coeff(F: TruncatedSeries, n: int, j: int, k=()) -> Fraction:
    return F.coeff(n, j, k)
