"""Truncated series in w^gamma and z with exact fraction coefficients.

A gamma is a rank r together with flag multiplicities r_{x,j} for each
marked point x, with sum_j r_{x,j} = r.  A Grading fixes which points and
which flag labels may occur, and lays gamma out as a flat integer vector
(r, r_{x1,j1}, r_{x1,j2}, ..., r_{x2,j1}, ...).

Internally each gamma carries one fraction whose denominator is free of z
and whose numerator holds every z-power from 0 to z_max, so convolution in
z is left to the polynomial library.  The (gamma, d) -> coefficient view is
recovered on demand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import flint

from .exactalg import ExactArithmeticError, LaurentPoly, Ring, ScalarFraction, to_fmpq

log = logging.getLogger(__name__)

__all__ = [
    "GammaExponent",
    "Grading",
    "GradedSeries",
    "TruncationError",
    "CertificateError",
    "mobius",
    "invert_unit",
    "adams",
    "pleth_exp",
    "pleth_log",
    "power_structure",
    "rescale_w",
    "filter_terms",
    "eval_z_one",
    "coefficient",
]


class TruncationError(ValueError):
    """Mismatched truncations or a query outside the truncation."""


class CertificateError(ValueError):
    """A z-tail that should vanish does not."""

    def __init__(self, msg, gamma=None):
        super().__init__(msg)
        self.gamma = gamma


def mobius(n: int) -> int:
    res, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            res = -res
        k += 1
    return -res if n > 1 else res


@dataclass(frozen=True)
class GammaExponent:
    """Rank plus flag multiplicities; parts maps (point, flag index) to r_{x,j}."""

    r: int
    parts: tuple = ()  # sorted tuple of ((x, j), mult) with mult > 0

    @classmethod
    def make(cls, r: int, parts: Mapping | Iterable = ()) -> "GammaExponent":
        items = parts.items() if isinstance(parts, Mapping) else parts
        acc: dict = {}
        for key, m in items:
            if m < 0:
                raise ValueError("negative flag multiplicity")
            if m:
                acc[tuple(key)] = acc.get(tuple(key), 0) + int(m)
        return cls(int(r), tuple(sorted(acc.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))))

    def points(self) -> set:
        return {x for (x, _), _ in self.parts}

    def at(self, x) -> dict:
        return {j: m for (y, j), m in self.parts if y == x}

    def check(self, points: Iterable) -> None:
        for x in points:
            if sum(self.at(x).values()) != self.r:
                raise ValueError(f"flag multiplicities at {x!r} do not sum to the rank {self.r}")
        extra = self.points() - set(points)
        if extra:
            raise ValueError(f"gamma mentions points outside the divisor: {sorted(map(str, extra))}")

    def __add__(self, other):
        d = dict(self.parts)
        for k, m in other.parts:
            d[k] = d.get(k, 0) + m
        return GammaExponent.make(self.r + other.r, d)

    def scale(self, n: int) -> "GammaExponent":
        return GammaExponent.make(n * self.r, {k: n * m for k, m in self.parts})

    def to_struct(self) -> dict:
        return {"r": self.r, "parts": [[x, j, m] for (x, j), m in self.parts]}

    @classmethod
    def from_struct(cls, data: Mapping) -> "GammaExponent":
        return cls.make(data["r"], {(x, j): m for x, j, m in data.get("parts", [])})


class Grading:
    """Which points and flag labels a series may use."""

    def __init__(self, points=(), flags=None, nflags: int | None = None):
        self.points = tuple(points)
        if flags is None:
            flags = [tuple(range(1, (nflags or 1) + 1)) for _ in self.points]
        self.flags = tuple(tuple(f) for f in flags)
        if len(self.flags) != len(self.points):
            raise ValueError("one flag list per point is required")
        self.offsets = []
        k = 1
        for f in self.flags:
            self.offsets.append(k)
            k += len(f)
        self.width = k

    def __eq__(self, other):
        return isinstance(other, Grading) and self.points == other.points and self.flags == other.flags

    def __hash__(self):
        return hash((self.points, self.flags))

    def __repr__(self):
        return f"Grading(points={self.points}, flags={self.flags})"

    def zero(self) -> tuple:
        return (0,) * self.width

    def vector(self, gamma: GammaExponent) -> tuple:
        v = [0] * self.width
        v[0] = gamma.r
        for (x, j), m in gamma.parts:
            try:
                p = self.points.index(x)
                v[self.offsets[p] + self.flags[p].index(j)] = m
            except ValueError:
                raise TruncationError(f"flag ({x}, {j}) is not part of this grading") from None
        for p in range(len(self.points)):
            o = self.offsets[p]
            if sum(v[o:o + len(self.flags[p])]) != gamma.r:
                raise ValueError(f"gamma is not in the monoid: flags at {self.points[p]!r} do not sum to r")
        return tuple(v)

    def gamma(self, vec: tuple) -> GammaExponent:
        parts = {}
        for p, x in enumerate(self.points):
            o = self.offsets[p]
            for k, j in enumerate(self.flags[p]):
                if vec[o + k]:
                    parts[(x, j)] = vec[o + k]
        return GammaExponent.make(vec[0], parts)

    def point_slices(self):
        return [(self.offsets[p], self.offsets[p] + len(self.flags[p])) for p in range(len(self.points))]


def _leq(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class GradedSeries:
    """Truncated series: data maps a gamma vector to a z-polynomial fraction."""

    __slots__ = ("ring", "grading", "r_max", "z_max", "cap", "data", "dropped")

    def __init__(self, ring: Ring, grading: Grading, r_max: int, z_max: int, data=None, cap=None):
        if r_max < 0 or z_max < 0:
            raise TruncationError("truncation must be nonnegative")
        self.ring = ring
        self.grading = grading
        self.r_max = r_max
        self.z_max = z_max
        self.cap = tuple(cap) if cap is not None else None
        self.data = {}
        self.dropped = 0
        for k, v in (data or {}).items():
            if self.admits(k) and not v.is_zero():
                v = _trunc(v, self.zi, z_max)
                if not v.is_zero():
                    self.data[k] = v

    # structure
    @property
    def zi(self) -> int:
        return self.ring.index("z")

    def admits(self, vec: tuple) -> bool:
        if vec[0] > self.r_max:
            return False
        return self.cap is None or _leq(vec, self.cap)

    def like(self, data=None) -> "GradedSeries":
        out = GradedSeries(self.ring, self.grading, self.r_max, self.z_max, cap=self.cap)
        if data:
            out.data = {k: v for k, v in data.items() if not v.is_zero()}
        return out

    def _check_compatible(self, other: "GradedSeries"):
        if not isinstance(other, GradedSeries):
            raise TypeError("expected a GradedSeries")
        if (self.r_max, self.z_max) != (other.r_max, other.z_max):
            raise TruncationError("truncation parameters differ")
        if self.grading != other.grading or self.ring is not other.ring:
            raise TruncationError("gradings differ")
        if self.cap != other.cap:
            raise TruncationError("caps differ")

    @classmethod
    def one(cls, ring, grading, r_max, z_max, cap=None) -> "GradedSeries":
        s = cls(ring, grading, r_max, z_max, cap=cap)
        s.data[grading.zero()] = ring.one()
        return s

    @classmethod
    def from_terms(cls, ring, grading, r_max, z_max, terms: Mapping, cap=None) -> "GradedSeries":
        """terms: {(gamma, d): coefficient}; gamma a GammaExponent or a vector."""
        s = cls(ring, grading, r_max, z_max, cap=cap)
        zi = ring.index("z")
        acc: dict = {}
        for (gamma, d), c in terms.items():
            vec = gamma if isinstance(gamma, tuple) else grading.vector(gamma)
            if d < 0:
                raise TruncationError("negative z-degree")
            if not s.admits(vec) or d > z_max:
                continue
            c = c if isinstance(c, ScalarFraction) else ring.const(c)
            _assert_z_free(c, zi)
            term = c.mul_monomial(1, _unit(ring.nvars, zi, d))
            acc[vec] = acc[vec] + term if vec in acc else term
        s.data = {k: v for k, v in acc.items() if not v.is_zero()}
        return s

    # views
    def gammas(self) -> list:
        return sorted(self.data)

    def zcoeffs(self, vec: tuple) -> dict:
        """{d: coefficient} for one gamma vector."""
        f = self.data.get(vec)
        if f is None:
            return {}
        return _split_z(f, self.zi)

    def terms(self):
        """Yield (GammaExponent, d, coefficient) in deterministic order."""
        for vec in self.gammas():
            g = self.grading.gamma(vec)
            for d, c in sorted(self.zcoeffs(vec).items()):
                yield g, d, c

    def nterms(self) -> int:
        return sum(len(self.zcoeffs(v)) for v in self.data)

    def constant_term(self) -> ScalarFraction:
        return self.zcoeffs(self.grading.zero()).get(0, self.ring.zero())

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        if (self.r_max, self.z_max, self.grading) != (other.r_max, other.z_max, other.grading):
            return False
        keys = set(self.data) | set(other.data)
        zero = self.ring.zero()
        return all(self.data.get(k, zero) == other.data.get(k, zero) for k in keys)

    def __repr__(self):
        return f"GradedSeries(r_max={self.r_max}, z_max={self.z_max}, gammas={len(self.data)})"

    # arithmetic
    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out[k] + v if k in out else v
        return self.like(out)

    def __neg__(self):
        return self.like({k: -v for k, v in self.data.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GradedSeries):
            self._check_compatible(other)
            return self.like(_convolve(self, self.data, other.data))
        return self.scale(other)

    def scale(self, c) -> "GradedSeries":
        """Multiply by a scalar; a scalar containing z is allowed if it is a z-polynomial."""
        c = c if isinstance(c, ScalarFraction) else self.ring.const(c)
        _assert_z_free(c, self.zi, allow_poly=True)
        zi, zm = self.zi, self.z_max
        return self.like({k: _trunc(v * c, zi, zm) for k, v in self.data.items()})

    def map_coefficients(self, fn: Callable) -> "GradedSeries":
        return self.like({k: fn(v) for k, v in self.data.items()})

    def truncate(self, r_max: int | None = None, z_max: int | None = None, cap=None) -> "GradedSeries":
        r_max = self.r_max if r_max is None else r_max
        z_max = self.z_max if z_max is None else z_max
        return GradedSeries(self.ring, self.grading, r_max, z_max, self.data, cap=cap if cap is not None else self.cap)

    def regrade(self, grading: Grading, vec_map: Callable, cap=None) -> "GradedSeries":
        """Move every gamma through vec_map (returning None drops it)."""
        out = GradedSeries(self.ring, grading, self.r_max, self.z_max, cap=cap)
        for k, v in self.data.items():
            k2 = vec_map(k)
            if k2 is None or not out.admits(k2):
                continue
            out.data[k2] = out.data[k2] + v if k2 in out.data else v
        out.data = {k: v for k, v in out.data.items() if not v.is_zero()}
        return out

    def to_struct(self) -> dict:
        return {
            "trunc": {"r_max": self.r_max, "z_max": self.z_max},
            "terms": [{"gamma": g.to_struct(), "zdeg": d, "coeff": c.to_text()} for g, d, c in self.terms()],
        }


def _unit(n: int, i: int, k: int) -> tuple:
    v = [0] * n
    v[i] = k
    return tuple(v)


def _assert_z_free(c: ScalarFraction, zi: int, allow_poly: bool = False):
    if c.is_zero():
        return
    if c.den.degrees()[zi] != 0:
        raise ValueError("series coefficients must have z-free denominators")
    if not allow_poly and (c.num.degrees()[zi] != 0 or c.shift[zi] != 0):
        raise ValueError("scalar coefficient must not contain z")
    if c.shift[zi] < 0:
        raise ValueError("negative power of z in a coefficient")


def _trunc(f: ScalarFraction, zi: int, zmax: int) -> ScalarFraction:
    """Drop z-powers above zmax from a fraction with z-free denominator."""
    if f.is_zero():
        return f
    s = f.shift[zi]
    if s < 0:
        raise ValueError("negative power of z in a series coefficient")
    if s > zmax:
        return f.ring.zero()
    keep = zmax - s + 1
    if f.num.degrees()[zi] < keep:
        return f
    ctx = f.ring.ctx
    zpow = ctx.term(exp_vec=_unit(f.ring.nvars, zi, keep), coeff=flint.fmpq(1))
    num = f.num % zpow
    return ScalarFraction._make(f.ring, num, f.den, f.shift, reduce=False)


def _split_z(f: ScalarFraction, zi: int) -> dict:
    ring = f.ring
    groups: dict = {}
    s = f.shift
    for e, c in f.num.terms():
        d = int(e[zi] + s[zi])
        e2 = tuple(a + b for a, b in zip(e, s))
        e2 = e2[:zi] + (0,) + e2[zi + 1:]
        groups.setdefault(d, {})[e2] = c
    out = {}
    den = ScalarFraction(ring, f.den, ring.ctx.constant(1), ring.zero_shift)
    for d, terms in groups.items():
        out[d] = ScalarFraction.from_laurent(LaurentPoly.from_terms(ring, terms)) / den
    return out


def _join_z(ring: Ring, coeffs: Mapping) -> ScalarFraction:
    zi = ring.index("z")
    total = ring.zero()
    for d, c in coeffs.items():
        if not c.is_zero():
            total = total + c.mul_monomial(1, _unit(ring.nvars, zi, d))
    return total


def _convolve(s: GradedSeries, a: Mapping, b: Mapping) -> dict:
    zi, zm = s.zi, s.z_max
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = _add(ka, kb)
            if not s.admits(k):
                continue
            p = _trunc(va * vb, zi, zm)
            if p.is_zero():
                continue
            out[k] = out[k] + p if k in out else p
    return out


def _rank_order(keys: Iterable) -> list:
    return sorted(keys, key=lambda k: (k[0], k))


def _all_vectors(s: GradedSeries) -> list:
    """Every admissible gamma vector up to r_max (or cap), rank 0 first."""
    grading = s.grading
    slices = grading.point_slices()
    out = []

    def compositions(total, parts):
        if parts == 0:
            if total == 0:
                yield ()
            return
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for r in range(s.r_max + 1):
        if s.cap is not None and r > s.cap[0]:
            break
        pieces = [list(compositions(r, hi - lo)) for lo, hi in slices]

        def rec(i, acc):
            if i == len(pieces):
                vec = (r,) + acc
                if s.admits(vec):
                    out.append(vec)
                return
            for p in pieces[i]:
                rec(i + 1, acc + p)

        rec(0, ())
    return out


# ----------------------------------------------------------------------
# z-univariate helpers for the gamma = 0 part


def _zlist(f: ScalarFraction, zi: int, zmax: int, zero) -> list:
    c = _split_z(f, zi) if not f.is_zero() else {}
    return [c.get(d, zero) for d in range(zmax + 1)]


def _z_inverse(a: list) -> list:
    if a[0].is_zero():
        raise ExactArithmeticError("constant term of the series is not a unit")
    b0 = a[0].inverse()
    b = [b0]
    for d in range(1, len(a)):
        acc = a[0].ring.zero()
        for k in range(1, d + 1):
            if not a[k].is_zero() and not b[d - k].is_zero():
                acc = acc + a[k] * b[d - k]
        b.append(-(b0 * acc))
    return b


def _z_exp(x: list) -> list:
    ring = x[0].ring
    e = [ring.one()]
    for d in range(1, len(x)):
        acc = ring.zero()
        for k in range(1, d + 1):
            if not x[k].is_zero() and not e[d - k].is_zero():
                acc = acc + x[k] * e[d - k] * k
        e.append(acc / d)
    return e


def _z_log(a: list) -> list:
    ring = a[0].ring
    l = [ring.zero()]
    for d in range(1, len(a)):
        acc = a[d] * d
        for k in range(1, d):
            if not l[k].is_zero() and not a[d - k].is_zero():
                acc = acc - l[k] * a[d - k] * k
        l.append(acc / d)
    return l


# ----------------------------------------------------------------------
# operations


def invert_unit(A: GradedSeries) -> GradedSeries:
    ring, zi, zm = A.ring, A.zi, A.z_max
    zero_vec = A.grading.zero()
    a0 = A.data.get(zero_vec, ring.zero())
    a0l = _zlist(a0, zi, zm, ring.zero())
    if a0l[0].is_zero():
        raise ExactArithmeticError("constant term of the series is not a unit")
    b0 = _trunc(_join_z(ring, dict(enumerate(_z_inverse(a0l)))), zi, zm)
    out = {zero_vec: b0}
    for k in _rank_order(_all_vectors(A)):
        if k[0] == 0:
            continue
        acc = None
        for k1, v1 in A.data.items():
            if k1[0] == 0 or not _leq(k1, k):
                continue
            k2 = _sub(k, k1)
            v2 = out.get(k2)
            if v2 is None:
                continue
            t = _trunc(v1 * v2, zi, zm)
            acc = t if acc is None else acc + t
        if acc is not None:
            v = _trunc(-(acc * b0), zi, zm)
            if not v.is_zero():
                out[k] = v
    return A.like(out)


def adams(A: GradedSeries, n: int) -> GradedSeries:
    if n < 1:
        raise ValueError("Adams operations need n >= 1")
    if n == 1:
        return A
    zi, zm = A.zi, A.z_max
    out = {}
    for k, v in A.data.items():
        k2 = tuple(n * x for x in k)
        if not A.admits(k2):
            continue
        f = _trunc(v.psi(n), zi, zm)
        if not f.is_zero():
            out[k2] = f
    return A.like(out)


def _has_rank0(A: GradedSeries) -> bool:
    return A.grading.zero() in A.data


def _adams_sum(A: GradedSeries, weight: Callable[[int], Fraction]) -> GradedSeries:
    total = A.like()
    n = 1
    limit = A.r_max if not _has_rank0(A) else max(A.r_max, A.z_max)
    while n <= max(limit, 1):
        w = weight(n)
        if w:
            total = total + adams(A, n).scale(to_fmpq(w))
        n += 1
    return total


def _ordinary_exp(X: GradedSeries) -> GradedSeries:
    ring, zi, zm = X.ring, X.zi, X.z_max
    zero_vec = X.grading.zero()
    x0 = X.data.get(zero_vec, ring.zero())
    e0 = _trunc(_join_z(ring, dict(enumerate(_z_exp(_zlist(x0, zi, zm, ring.zero()))))), zi, zm) \
        if not x0.is_zero() else ring.one()
    out = {zero_vec: e0}
    pos = {k: v for k, v in X.data.items() if k[0] > 0}
    for k in _rank_order(_all_vectors(X)):
        r = k[0]
        if r == 0:
            continue
        acc = None
        for k1, v1 in pos.items():
            if not _leq(k1, k):
                continue
            e = out.get(_sub(k, k1))
            if e is None:
                continue
            t = _trunc(v1 * e, zi, zm)
            if k1[0] != 1:
                t = t * k1[0]
            acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            out[k] = acc / r
    return X.like(out)


def _ordinary_log(A: GradedSeries) -> GradedSeries:
    ring, zi, zm = A.ring, A.zi, A.z_max
    zero_vec = A.grading.zero()
    a0 = A.data.get(zero_vec, ring.zero())
    a0l = _zlist(a0, zi, zm, ring.zero())
    if a0l[0] != 1:
        raise ValueError("Log needs constant term 1")
    out = {}
    l0 = _join_z(ring, dict(enumerate(_z_log(a0l))))
    if not l0.is_zero():
        out[zero_vec] = _trunc(l0, zi, zm)
    has_z = any(not c.is_zero() for c in a0l[1:])
    inv0 = _trunc(_join_z(ring, dict(enumerate(_z_inverse(a0l)))), zi, zm) if has_z else None
    for k in _rank_order(_all_vectors(A)):
        r = k[0]
        if r == 0:
            continue
        acc = A.data.get(k)
        if acc is not None:
            acc = acc * r
        for k1, l1 in out.items():
            if k1[0] == 0 or k1[0] >= r or not _leq(k1, k):
                continue
            a = A.data.get(_sub(k, k1))
            if a is None:
                continue
            t = _trunc(l1 * a, zi, zm) * k1[0]
            acc = -t if acc is None else acc - t
        if acc is None or acc.is_zero():
            continue
        if inv0 is not None:
            acc = _trunc(acc * inv0, zi, zm)
        v = acc / r
        if not v.is_zero():
            out[k] = v
    return A.like(out)


def pleth_exp(A: GradedSeries) -> GradedSeries:
    """Exp(A) = exp(sum_n psi_n(A)/n)."""
    if not A.constant_term().is_zero():
        raise ValueError("Exp needs a series with zero constant term")
    return _ordinary_exp(_adams_sum(A, lambda n: Fraction(1, n)))


def pleth_log(A: GradedSeries) -> GradedSeries:
    """Log(A) = sum_n mu(n)/n psi_n(log A)."""
    if A.constant_term() != 1:
        raise ValueError("Log needs constant term 1")
    return _adams_sum(_ordinary_log(A), lambda n: Fraction(mobius(n), n))


def power_structure(f: GradedSeries, A) -> GradedSeries:
    """Pow(f, A) = Exp(A * Log f)."""
    return pleth_exp(pleth_log(f).scale(A))


def rescale_w(A: GradedSeries, c, k: int) -> GradedSeries:
    """Coefficient at w^gamma times c^{rk gamma}, z-degree shifted by k * rk gamma."""
    ring = A.ring
    c = c if isinstance(c, ScalarFraction) else ring.const(c)
    if not c.is_monomial():
        raise ValueError("rescale_w needs a monomial")
    zi, zm = A.zi, A.z_max
    out = {}
    dropped = 0
    for key, v in A.data.items():
        r = key[0]
        f = v * c ** r if r else v
        if k and r:
            f = f.mul_monomial(1, _unit(ring.nvars, zi, k * r))
            if f.shift[zi] < 0:
                raise TruncationError("rescaling produced negative z-powers")
            before = len(_split_z(f, zi))
            f = _trunc(f, zi, zm)
            dropped += before - (len(_split_z(f, zi)) if not f.is_zero() else 0)
        if not f.is_zero():
            out[key] = f
    res = A.like(out)
    res.dropped = A.dropped + dropped
    if dropped:
        log.warning("rescale_w dropped %d terms beyond z_max=%d", dropped, zm)
    return res


def filter_terms(A: GradedSeries, pred: Callable) -> GradedSeries:
    """Keep the terms (gamma, d) with pred(gamma, d) true; gamma given as GammaExponent."""
    ring = A.ring
    out = {}
    for key, v in A.data.items():
        g = A.grading.gamma(key)
        kept = {d: c for d, c in _split_z(v, A.zi).items() if pred(g, d)}
        if kept:
            out[key] = _join_z(ring, kept)
    return A.like(out)


def filter_gammas(A: GradedSeries, pred: Callable) -> GradedSeries:
    """Keep whole gamma-slices; pred receives the gamma vector."""
    return A.like({k: v for k, v in A.data.items() if pred(k)})


def tail_ok(A: GradedSeries, vec: tuple, window: int) -> bool:
    f = A.data.get(vec)
    if f is None:
        return True
    top = f.num.degrees()[A.zi] + f.shift[A.zi]
    return top < A.z_max - window


def eval_z_one(A: GradedSeries, check_window: int = 5) -> dict:
    """{gamma vector: value at z = 1}, after checking that the z-tail vanishes."""
    if check_window < 1:
        raise ValueError("tail window must be at least 1")
    out = {}
    for vec in A.gammas():
        if not tail_ok(A, vec, check_window):
            raise CertificateError(
                f"coefficients of w^{A.grading.gamma(vec).to_struct()} do not vanish for z-degree in "
                f"[{A.z_max - check_window}, {A.z_max}]", gamma=vec)
        out[vec] = A.data[vec].substitute({"z": 1})
    return out


def coefficient(A: GradedSeries, gamma, d: int) -> ScalarFraction:
    vec = gamma if isinstance(gamma, tuple) else A.grading.vector(gamma)
    if vec[0] > A.r_max or not 0 <= d <= A.z_max:
        raise TruncationError(f"(rank {vec[0]}, z^{d}) is outside the truncation ({A.r_max}, {A.z_max})")
    if A.cap is not None and not _leq(vec, A.cap):
        raise TruncationError("gamma lies outside the series cap")
    return A.zcoeffs(vec).get(d, A.ring.zero())
