"""Singularity constants of marked map equations.

At ``x = 1`` the map series has its dominant singularity at ``z = 1/12``.
When faces are marked with ``x_j``, the singularity moves to ``rho(x)``, and
the quasi-power behaviour

    E[prod x_j^{X_j}] ~ A(x) exp(n f(x)),   f(x) = log(rho(1)/rho(x)),

gives the mean and variance slopes of the marked counts.  The singular point
is located with the double-point system of the kernel method in the unknowns
``(u, M, Y, z)``, with ``Y = M(z, 1)``:

    F = 0,   dF/dM = 0,   dF/du = 0,   F_MM F_uu - F_Mu^2 = 0.

The coefficients ``m_i = [u^i] M`` that the marking terms reference are
eliminated.  They satisfy ``m_i = z sum m_a m_b + z (Y - sum_{j<i-1} m_j) +
(marking part)``, and the marking part is ``O(x - 1)``, so they are exact
polynomials in ``(z, Y)`` to every fixed order in ``x - 1``.

Derivatives of ``rho`` come from truncated Taylor arithmetic.  Along a
direction ``v`` the marking variables are ``y = s v``, every quantity is a
jet in ``s``, and a chord Newton iteration yields ``z(s) = rho + rho' s +
rho''/2 s^2``.  Mixed second derivatives come from polarization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
from mpmath import mp, mpf

from .enumeration import MarkingTerm, SeriesFamily, factorial_moment_exact, tutte_count

DEFAULT_PRECISION_BITS = 256
RATIONAL_DENOMINATOR_BOUND = 10 ** 18
FIXED_POINT_SWEEPS = 400        # cap for eliminating m_i at a numeric point
#: exact unmarked double point (u, M, Y, z)
BASE_POINT = (Fraction(6, 5), Fraction(5, 3), Fraction(4, 3), Fraction(1, 12))


class AsymptoticsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# truncated arithmetic
# ---------------------------------------------------------------------------
# An s-jet is a list of S+1 coefficients.  A full jet maps (a, b), the powers
# of the displacements du and dM with a + b <= 2, to s-jets.

def _sj_mul(x, y, S):
    out = [0] * (S + 1)
    for i, a in enumerate(x):
        if a:
            for j in range(S + 1 - i):
                b = y[j]
                if b:
                    out[i + j] += a * b
    return out


def _sj_add(x, y):
    return [a + b for a, b in zip(x, y)]


def _sj_sub(x, y):
    return [a - b for a, b in zip(x, y)]


def _sj_scale(x, c):
    return [c * a for a in x]


def _sj_const(c, S):
    return [c] + [0] * S


class _Jet:
    """Polynomial in (du, dM) of total degree <= 2 with s-jet coefficients."""

    __slots__ = ("c", "S")

    def __init__(self, c: dict, S: int):
        self.c = c
        self.S = S

    @classmethod
    def const(cls, sj, S):
        return cls({(0, 0): list(sj)}, S)

    def __add__(self, o):
        if not isinstance(o, _Jet):
            o = _Jet.const(o, self.S)
        c = {k: list(v) for k, v in self.c.items()}
        for k, v in o.c.items():
            c[k] = _sj_add(c[k], v) if k in c else list(v)
        return _Jet(c, self.S)

    def __neg__(self):
        return _Jet({k: [-a for a in v] for k, v in self.c.items()}, self.S)

    def __sub__(self, o):
        return self + (-o if isinstance(o, _Jet) else _Jet.const([-a for a in o], self.S))

    def __mul__(self, o):
        if not isinstance(o, _Jet):
            return _Jet({k: _sj_mul(v, o, self.S) for k, v in self.c.items()}, self.S)
        c = {}
        for (a1, b1), x in self.c.items():
            for (a2, b2), y in o.c.items():
                if a1 + a2 + b1 + b2 > 2:
                    continue
                k = (a1 + a2, b1 + b2)
                p = _sj_mul(x, y, self.S)
                c[k] = _sj_add(c[k], p) if k in c else p
        return _Jet(c, self.S)

    def recip(self):
        x0 = self.c[(0, 0)]
        if not x0[0]:
            raise AsymptoticsError("division by a vanishing jet")
        # invert the s-jet, then the (du, dM) part by a geometric series
        inv = [1 / x0[0]] + [0] * self.S
        for k in range(1, self.S + 1):
            inv[k] = -sum(x0[i] * inv[k - i] for i in range(1, k + 1)) / x0[0]
        eps = _Jet({k: v for k, v in self.c.items() if k != (0, 0)}, self.S) * inv
        out = _Jet.const(_sj_const(1, self.S), self.S)
        term = out
        for _ in range(2):
            term = term * (-eps)
            out = out + term
        return out * inv

    def part(self, a, b):
        return self.c.get((a, b), [0] * (self.S + 1))


# ---------------------------------------------------------------------------
# the system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BMJSystem:
    """Double-point system of a marked map equation.

    ``terms`` are the marking terms; ``arity`` the number of marking
    variables.  ``L`` is the number of coefficients ``m_i`` kept when they are
    eliminated.
    """
    terms: tuple
    arity: int
    L: int
    pmax: int
    smax: int

    @property
    def unknowns(self) -> tuple:
        return ("u", "M", "Y", "z")

    def equations(self) -> tuple:
        return ("F", "F_M", "F_u", "F_MM*F_uu - F_Mu^2")

    # -- coefficient elimination -------------------------------------------
    def _aux(self, m, z, S):
        """Low coefficients of powers of M, P_l = M alpha_l + beta_l and S_l."""
        top = max(self.pmax, self.smax, 2)
        zero = [0] * (S + 1)
        Q = [list(m[:top + 1])]
        for k in range(1, top + 1):
            prev = Q[-1]
            Q.append([_sum_products(prev, m, j, S) for j in range(top + 1)])
        alpha = [[_sj_const(1, S)]]
        beta = [[]]
        for l in range(1, self.pmax + 1):
            al = [list(zero) for _ in range(l + 1)]
            be = [list(zero) for _ in range(l)]
            al[0] = _sj_const(1, S)
            for k in range(l):
                be[k] = _sj_sub(be[k], m[k])
                q = Q[k][l - k]
                for i, a in enumerate(alpha[k]):
                    al[i + l - k] = _sj_sub(al[i + l - k], _sj_mul(a, q, S))
                for i, b in enumerate(beta[k]):
                    be[i + l - k] = _sj_sub(be[i + l - k], _sj_mul(b, q, S))
            alpha.append(al)
            beta.append(be)
        Sv = [None]
        for l in range(1, self.smax + 1):
            acc = list(m[l])
            for k in range(1, l):
                acc = _sj_sub(acc, _sj_mul(Sv[k], Q[k - 1][l - k], S))
            if l >= 2:
                acc = _sj_sub(acc, _sj_mul(z, Q[1][l - 2], S))
            Sv.append(acc)
        return alpha, beta, Sv

    def _weights(self, Sv, S):
        out = []
        for t in self.terms:
            w = _sj_const(1, S)
            for l in t.s_factors:
                w = _sj_mul(w, Sv[l], S)
            out.append(w)
        return out

    def _term_factors(self, z, direction, S):
        """c y_var z^(e+1) as s-jets, or None for terms switched off.

        For ``S >= 1`` the marking variables are ``y = direction * s``; for
        ``S = 0`` they are the constants ``y = direction``.
        """
        out = []
        for t in self.terms:
            v = direction[t.var]
            if not v:
                out.append(None)
                continue
            zp = _sj_const(1, S)
            for _ in range(t.e + 1):
                zp = _sj_mul(zp, z, S)
            y = [0] * (S + 1)
            y[min(S, 1)] = v * t.c
            out.append(_sj_mul(zp, y, S))
        return out

    def coefficients(self, Y, z, direction, S):
        """The s-jets m_0 .. m_{L-1} as functions of (Y, z)."""
        L = self.L
        zero = [0] * (S + 1)
        m = [list(zero) for _ in range(L)]
        m[0] = _sj_const(1, S)
        facs = self._term_factors(z, direction, S)
        active = any(f is not None for f in facs)
        # each sweep fixes one more order in s; constant y needs a fixed point
        sweeps = 1 if not active else (S + 1 if S else FIXED_POINT_SWEEPS)
        for _sweep in range(sweeps):
            before = [x[0] for x in m]
            if active:
                alpha, beta, Sv = self._aux(m, z, S)
                W = self._weights(Sv, S)
            prefix = list(zero)          # sum_{j < i-1} m_j
            for i in range(1, L):
                if i >= 2:
                    prefix = _sj_add(prefix, m[i - 2])
                acc = _sj_mul(z, _sj_sub(Y, prefix), S)
                if i >= 2:
                    acc = _sj_add(acc, _sj_mul(z, _sum_products(m, m, i - 2, S), S))
                if active:
                    for t, fac, w in zip(self.terms, facs, W):
                        if fac is None:
                            continue
                        q = i - t.upow
                        if q < 0:
                            continue
                        al, be = alpha[t.h - 1], beta[t.h - 1]
                        val = list(zero)
                        for j, a in enumerate(al):
                            if 0 <= q - j < L:
                                val = _sj_add(val, _sj_mul(a, m[q - j], S))
                        if q < len(be):
                            val = _sj_add(val, be[q])
                        acc = _sj_add(acc, _sj_mul(_sj_mul(fac, w, S), val, S))
                m[i] = acc
            if active and not S and max(abs(a[0] - b) for a, b in zip(m, before)) < mpf(2) ** (-mp.prec):
                break
        return m

    # -- the equations -------------------------------------------------------
    def kernel(self, w, direction, S):
        """F(u + du, M + dM, Y, z) as a jet; ``w`` holds four s-jets."""
        u, M, Y, z = w
        U = _Jet({(0, 0): list(u), (1, 0): _sj_const(1, S)}, S)
        Mv = _Jet({(0, 0): list(M), (0, 1): _sj_const(1, S)}, S)
        F = _Jet.const(_sj_const(1, S), S) - Mv
        F = F + U * U * Mv * Mv * z
        F = F + U * (U * Mv - _Jet.const(Y, S)) * (U - _sj_const(1, S)).recip() * z
        facs = self._term_factors(z, direction, S)
        if any(f is not None for f in facs):
            m = self.coefficients(Y, z, direction, S)
            alpha, beta, Sv = self._aux(m, z, S)
            W = self._weights(Sv, S)
            Uinv = None
            for t, fac, wt in zip(self.terms, facs, W):
                if fac is None:
                    continue
                A = _horner(alpha[t.h - 1], U, S)
                B = _horner(beta[t.h - 1], U, S)
                term = (Mv * A + B) * _sj_mul(fac, wt, S)
                p = t.upow
                if p < 0:
                    Uinv = Uinv or U.recip()
                    for _ in range(-p):
                        term = term * Uinv
                else:
                    for _ in range(p):
                        term = term * U
                F = F + term
        return F

    def residual(self, w, direction=None, S=0):
        """The four equations as s-jets."""
        direction = direction or (0,) * self.arity
        F = self.kernel(w, direction, S)
        det = _sj_sub(_sj_scale(_sj_mul(F.part(2, 0), F.part(0, 2), S), 4),
                      _sj_mul(F.part(1, 1), F.part(1, 1), S))
        return [F.part(0, 0), F.part(0, 1), F.part(1, 0), det]


def _sum_products(x, y, n, S):
    """sum_{a+b=n} x_a y_b for s-jets."""
    acc = [0] * (S + 1)
    for a in range(n + 1):
        if a < len(x) and n - a < len(y):
            acc = _sj_add(acc, _sj_mul(x[a], y[n - a], S))
    return acc


def _horner(coeffs, U: _Jet, S) -> _Jet:
    out = _Jet.const([0] * (S + 1), S)
    for c in reversed(coeffs):
        out = out * U + _Jet.const(c, S)
    return out


def build_bmj_system(terms: Sequence[MarkingTerm], arity: int | None = None,
                     margin: int | None = None) -> BMJSystem:
    """Double-point system of the map equation with the given marking terms."""
    terms = tuple(terms)
    if arity is None:
        arity = max((t.var + 1 for t in terms), default=0)
    if any(t.var >= arity for t in terms):
        raise AsymptoticsError("marking term refers to a missing variable")
    pmax = max([t.h - 1 for t in terms] + [0])
    smax = max([len(t.s) for t in terms] + [0])
    hmax = max([max(t.h, 2 - t.upow) for t in terms] + [2])
    need = max(pmax, smax, 2) + 2
    L = need + 4 * (hmax + 2) if margin is None else need + margin
    return BMJSystem(terms, arity, L, pmax, smax)


# ---------------------------------------------------------------------------
# solving and differentiating
# ---------------------------------------------------------------------------

def _to_mpf(x):
    return mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpf(x)


def _jacobian(sys: BMJSystem, w0):
    """Central-difference Jacobian of the equations at s = 0."""
    h = mpf(2) ** (-(mp.prec // 2))
    J = mpmath.matrix(4, 4)
    for k in range(4):
        wp = [[x] for x in w0]
        wm = [[x] for x in w0]
        wp[k][0] += h
        wm[k][0] -= h
        gp = sys.residual(wp)
        gm = sys.residual(wm)
        for i in range(4):
            J[i, k] = (gp[i][0] - gm[i][0]) / (2 * h)
    return J


def _chord_solve(sys, w, J, direction, S, tol, max_iter=40):
    """Newton-chord iteration on s-jets; returns (w, last step, residual)."""
    step = mpf(0)
    for _ in range(max_iter):
        g = sys.residual(w, direction, S)
        step = mpf(0)
        for c in range(S + 1):
            rhs = mpmath.matrix([g[i][c] for i in range(4)])
            d = mpmath.lu_solve(J, rhs)
            for k in range(4):
                w[k][c] -= d[k]
                step = max(step, abs(d[k]))
        if step < tol:
            g = sys.residual(w, direction, S)
            res = max(abs(g[i][c]) for i in range(4) for c in range(S + 1))
            return w, step, res
    raise AsymptoticsError("Newton iteration did not converge")


def to_rational(x, bound: int = RATIONAL_DENOMINATOR_BOUND, tol=None) -> Fraction | None:
    """Continued-fraction reconstruction; None unless within ``tol`` (default 2^-200)."""
    if not isinstance(x, mpmath.mpf):
        x = mpf(x)
    man, exp = x.man_exp                # man_exp drops the sign
    exact = Fraction(int(man)) * (Fraction(2) ** int(exp))
    if x < 0:
        exact = -exact
    q = exact.limit_denominator(bound)
    tol = Fraction(1, 2 ** 200) if tol is None else Fraction(tol)
    return q if abs(q - exact) < tol else None


@dataclass
class ConstantsReport:
    """Singularity data of a marked map equation at ``x = 1``.

    ``rho2`` and ``f2`` are symmetric matrices indexed by marking variable.
    ``error`` bounds the absolute error of every entry (last Newton step).
    """
    rho: object
    rho1: list
    rho2: list
    f1: list
    f2: list
    precision_bits: int
    error: object
    residual: object
    g1: list | None = None
    mu: object = None
    sigma2: object = None
    labels: list = field(default_factory=list)

    @property
    def arity(self) -> int:
        return len(self.rho1)

    def rational(self, value) -> Fraction | None:
        return to_rational(value)

    def workprec(self):
        """Context for arithmetic on the report's values at their precision."""
        return mp.workprec(self.precision_bits)

    def to_dict(self) -> dict:
        digits = int(self.precision_bits * math.log10(2))

        def cell(v):
            if v is None:
                return None
            q = to_rational(v)
            return {"decimal": mpmath.nstr(v, digits),
                    "rational": None if q is None else str(q),
                    "verified": q is not None}

        out = {
            "precision_bits": self.precision_bits,
            "error_bound": mpmath.nstr(self.error, 5),
            "residual": mpmath.nstr(self.residual, 5),
            "labels": list(self.labels),
            "rho": cell(self.rho),
            "rho1": [cell(v) for v in self.rho1],
            "rho2": [[cell(v) for v in row] for row in self.rho2],
            "f1": [cell(v) for v in self.f1],
            "f2": [[cell(v) for v in row] for row in self.f2],
            "g1": None if self.g1 is None else [cell(v) for v in self.g1],
            "mu": cell(self.mu),
            "sigma2": cell(self.sigma2),
        }
        return out

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def solve_and_differentiate(sys: BMJSystem, precision_bits: int = DEFAULT_PRECISION_BITS,
                            second_order: bool = True) -> ConstantsReport:
    """Locate rho(1) and differentiate it along every marking variable.

    With ``second_order`` the full Hessian of rho is computed, using one solve
    per variable and one per pair of variables.
    """
    if precision_bits < 64:
        raise AsymptoticsError("need at least 64 bits of precision")
    with mp.workprec(precision_bits):
        tol = mpf(2) ** (-(precision_bits - 40))
        w0 = [[_to_mpf(x)] for x in BASE_POINT]
        J = _jacobian(sys, [w[0] for w in w0])
        if abs(mpmath.det(J)) < mpf(2) ** (-precision_bits // 4):
            raise AsymptoticsError("singular Jacobian at the unmarked point")
        w0, err, res = _chord_solve(sys, w0, J, None, 0, tol)
        base = [w[0] for w in w0]
        rho = base[3]
        r = sys.arity
        S = 2 if second_order else 1

        def along(direction):
            w = [[x] + [mpf(0)] * S for x in base]
            w, step, rr = _chord_solve(sys, w, J, tuple(direction), S, tol)
            return w[3], step, rr

        rho1 = [mpf(0)] * r
        diag = [mpf(0)] * r
        for i in range(r):
            e = [0] * r
            e[i] = 1
            zs, step, rr = along(e)
            err, res = max(err, step), max(res, rr)
            rho1[i] = zs[1]
            if second_order:
                diag[i] = 2 * zs[2]
        rho2 = [[mpf(0)] * r for _ in range(r)]
        if second_order:
            for i in range(r):
                rho2[i][i] = diag[i]
                for j in range(i + 1, r):
                    e = [0] * r
                    e[i] = e[j] = 1
                    zs, step, rr = along(e)
                    err, res = max(err, step), max(res, rr)
                    rho2[i][j] = rho2[j][i] = zs[2] - (diag[i] + diag[j]) / 2
        f1 = [-x / rho for x in rho1]
        f2 = [[-rho2[i][j] / rho + rho1[i] * rho1[j] / rho ** 2 for j in range(r)] for i in range(r)]
        rep = ConstantsReport(rho, rho1, rho2, f1, f2, precision_bits, err, res,
                              labels=[f"x{i + 1}" for i in range(r)])
        if r == 1 and second_order:
            # a single pattern marked directly: Var[X_n] ~ (f' + f'') n
            rep.mu = f1[0]
            rep.sigma2 = f1[0] + f2[0][0]
        return rep


def singularity_at(sys: BMJSystem, y: Sequence, precision_bits: int = DEFAULT_PRECISION_BITS):
    """rho at the point ``x = 1 + y`` by a plain Newton solve (small ``y`` only)."""
    if len(y) != sys.arity:
        raise AsymptoticsError("y does not match the marking variables")
    with mp.workprec(precision_bits):
        tol = mpf(2) ** (-(precision_bits - 40))
        y = tuple(_to_mpf(Fraction(v)) if isinstance(v, (int, Fraction)) else mpf(v) for v in y)
        w = [[_to_mpf(x)] for x in BASE_POINT]
        w, _, _ = _chord_solve(sys, w, _jacobian(sys, [x[0] for x in w]), None, 0, tol)
        # the chord Jacobian of x = 1 is good enough for small y
        J = _jacobian(sys, [x[0] for x in w])
        w, _, _ = _chord_solve(sys, w, J, y, 0, tol, max_iter=200)
        return w[3][0]


def pattern_constants(catalog, report: ConstantsReport) -> tuple:
    """Mean and variance slopes of the pattern count from face-class constants.

    ``report`` must come from the catalog's marking terms, so variable
    ``j - 1`` belongs to face class ``j``.
    """
    J = len(catalog.face_classes)
    if report.arity < J:
        raise AsymptoticsError(f"report covers {report.arity} face classes, catalog has {J}")
    with mp.workprec(report.precision_bits):
        t0 = catalog.t.get(0, 1) - 1
        f = report.f1
        r0, d0 = catalog.r0, catalog.d0
        w0 = mpf(12) ** d0
        mu = r0 * f[t0] / w0
        var = r0 ** 2 * (report.f2[t0][t0] - 2 * d0 * f[t0] ** 2) / w0 ** 2 + mu
        for ty in catalog.types:
            j = ty.face_class - 1
            c = catalog.face_class(ty.face_class).c
            var += 2 * ty.r * f[j] / (mpf(12) ** ty.d * c)
        return mu, var


def with_pattern_constants(catalog, report: ConstantsReport) -> ConstantsReport:
    mu, var = pattern_constants(catalog, report)
    return replace(report, mu=mu, sigma2=var)


def constants_for_catalog(catalog, precision_bits: int = DEFAULT_PRECISION_BITS) -> ConstantsReport:
    """Face-class constants of a catalog together with the pattern's mu and sigma^2."""
    terms = catalog.marking_terms()
    sys = build_bmj_system(terms, len(catalog.face_classes))
    rep = solve_and_differentiate(sys, precision_bits)
    rep.labels = [f"class{fc.index}" for fc in catalog.face_classes]
    return with_pattern_constants(catalog, rep)


# ---------------------------------------------------------------------------
# moment checks
# ---------------------------------------------------------------------------

def ratio_asymptotic_check(n: int, k: int) -> Fraction:
    """|m_{n-k}/m_n * 12^k - 1 - 5k/(2n)|, exactly."""
    if not 0 <= k < n:
        raise AsymptoticsError("need n > k >= 0")
    # m_j / m_{j-1} = 6(2j-1)/(j+2)
    ratio = Fraction(1)
    for j in range(n - k + 1, n + 1):
        ratio *= Fraction(j + 2, 6 * (2 * j - 1))
    return abs(ratio * 12 ** k - 1 - Fraction(5 * k, 2 * n))


def ratio_constant(n: int, k_max: int = 10) -> float:
    """Smallest C with residual(n, k) <= C (k/n)^2 for 1 <= k <= k_max."""
    return max(float(ratio_asymptotic_check(n, k) * Fraction(n, k) ** 2) for k in range(1, k_max + 1))


def lemm_factorial_check(family: SeriesFamily, n: int, k, report: ConstantsReport):
    """Relative deviation of E[(X_n)_k] from prod (n f_i)^k_i exp(<k, Sigma k>/(2n)).

    ``Sigma_ij = f_ij / (f_i f_j)``.
    """
    if isinstance(k, int):
        k = (k,)
    k = tuple(k)
    if len(k) != family.r:
        raise AsymptoticsError("multidegree does not match the marking variables")
    if sum(k) > family.K or n > family.N:
        raise AsymptoticsError("moment outside the computed truncation")
    if sum(k) == 0:
        return mpf(0)
    with mp.workprec(report.precision_bits):
        exact = factorial_moment_exact(family, n, k)
        f1, f2 = report.f1, report.f2
        main = mpf(1)
        for i, ki in enumerate(k):
            main *= (n * f1[i]) ** ki
        quad = sum(k[i] * k[j] * f2[i][j] / (f1[i] * f1[j])
                   for i in range(len(k)) for j in range(len(k)) if k[i] and k[j])
        formula = main * mpmath.exp(quad / (2 * n))
        return _to_mpf(exact) / formula - 1


@dataclass
class GWProfile:
    residuals: dict
    side_conditions: dict

    @property
    def max_residual(self):
        return max((abs(v) for v in self.residuals.values()), default=0.0)


def gw_condition_check(mu_n, sigma_n, moments: Mapping, k_range: Sequence | None = None) -> GWProfile:
    """Log-ratio of factorial moments to mu^k exp(k^2 (sigma^2 - mu) / (2 mu^2)).

    ``mu_n`` and ``sigma_n`` are numbers, or sequences over growing ``n``
    whose last entries are the ones the moments belong to; sequences also
    get the side conditions checked (each ratio must decrease along them).
    """
    mus = list(mu_n) if isinstance(mu_n, Sequence) else [mu_n]
    sigmas = list(sigma_n) if isinstance(sigma_n, Sequence) else [sigma_n]
    if len(mus) != len(sigmas):
        raise AsymptoticsError("mu and sigma sequences differ in length")
    mu, sigma = float(mus[-1]), float(sigmas[-1])
    ks = sorted(moments) if k_range is None else [k for k in k_range if k in moments]
    if not ks:
        raise AsymptoticsError("empty k-range")
    res = {}
    for k in ks:
        target = k * math.log(mu) + k * k * (sigma ** 2 - mu) / (2 * mu * mu)
        res[k] = math.log(float(moments[k])) - target
    side = {"mu_grows": all(b > a for a, b in zip(mus, mus[1:])) if len(mus) > 1 else mu > 1}
    r1 = [s * math.log(s) ** 2 / m for m, s in zip(mus, sigmas)]
    r2 = [m / s ** 3 for m, s in zip(mus, sigmas)]
    if len(mus) > 1:
        side["sigma_log2_sigma_over_mu_decreases"] = all(b < a for a, b in zip(r1, r1[1:]))
        side["mu_over_sigma3_decreases"] = all(b < a for a, b in zip(r2, r2[1:]))
    else:
        side["sigma_log2_sigma_over_mu"] = r1[0]
        side["mu_over_sigma3"] = r2[0]
    return GWProfile(res, side)


def fit_constant_term(ns: Sequence[int], values: Sequence, slope, order: int | None = None):
    """Fit values[i] - slope*n = g + a_1/n + ... + a_q/n^q exactly through the points; return g."""
    ns = list(ns)
    q = len(ns) - 1 if order is None else order
    if len(ns) != q + 1:
        raise AsymptoticsError("need exactly order + 1 points")
    A = mpmath.matrix(q + 1, q + 1)
    b = mpmath.matrix(q + 1, 1)
    for r, n in enumerate(ns):
        for c in range(q + 1):
            A[r, c] = mpf(1) / mpf(n) ** c
        b[r] = _to_mpf(values[r]) - slope * n
    return mpmath.lu_solve(A, b)[0]


def pattern_factorial_moment(catalog, family: SeriesFamily, n: int, k: int) -> Fraction:
    """E[(X_n)_k] of the pattern count assembled from marked face-class counts.

    Pattern tuples are grouped into s isolated copies and p_i intersecting
    pairs of type i.  Exact for k <= 2; for larger k overlaps of three or more
    copies are ignored.
    """
    J = len(catalog.face_classes)
    if family.r < J:
        raise AsymptoticsError("family lacks face-class variables")
    types = catalog.types
    t0 = catalog.t.get(0, 1) - 1
    total = Fraction(0)

    def pair_choices(rem, idx):
        if idx == len(types):
            yield ()
            return
        for p in range(rem // 2 + 1):
            for rest in pair_choices(rem - 2 * p, idx + 1):
                yield (p,) + rest
    for p in pair_choices(k, 0):
        s = k - 2 * sum(p)
        kbar = [0] * J
        kbar[t0] += s
        size = n - catalog.d0 * s
        w = Fraction(catalog.r0) ** s
        groups = {t0: [s]}
        for ty, pi in zip(types, p):
            if pi:
                j = ty.face_class - 1
                kbar[j] += pi
                size -= ty.d * pi
                w *= catalog.overcount_factor(ty.index) ** pi
                groups.setdefault(j, []).append(pi)
        if size < 0 or sum(kbar) > family.K:
            if size < 0:
                continue
            raise AsymptoticsError("moment needs a higher truncation degree")
        for parts in groups.values():
            w *= math.factorial(sum(parts))
            for x in parts:
                w /= math.factorial(x)
        total += w * family.count(size, tuple(kbar))
    return total * math.factorial(k) / tutte_count(n)
