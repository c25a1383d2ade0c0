"""Exact arithmetic: sparse Laurent polynomials and reduced fractions.

Everything lives in one polynomial ring per genus g, with generators

    qh, a1, ..., ag, z, uh, vh, t

where qh stands for q^(1/2), uh for u^(1/2) and vh for v^(1/2).  The heavy
lifting (multiplication, exact division, gcd) is done by FLINT's
``fmpq_mpoly``; this module adds Laurent shifts, fraction normalization and
the Adams operations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint

__all__ = [
    "ExactArithmeticError",
    "Ring",
    "LaurentPoly",
    "ScalarFraction",
    "get_ring",
    "set_full_reduction",
    "full_reduction",
    "to_fmpq",
    "substitute",
]


class ExactArithmeticError(ZeroDivisionError):
    """Division by an exact zero, directly or after a substitution."""


_FULL_REDUCTION = True


def set_full_reduction(flag: bool) -> bool:
    """Toggle the multivariate gcd pass; returns the previous setting."""
    global _FULL_REDUCTION
    old = _FULL_REDUCTION
    _FULL_REDUCTION = bool(flag)
    return old


def full_reduction() -> bool:
    return _FULL_REDUCTION


def to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, (int, flint.fmpz)):
        return flint.fmpq(int(c))
    if isinstance(c, str):
        f = Fraction(c)
        return flint.fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot read {c!r} as a rational")


def _frac_text(c: flint.fmpq) -> str:
    p, q = int(c.p), int(c.q)
    return str(p) if q == 1 else f"{p}/{q}"


class Ring:
    """Generator bookkeeping for a fixed genus g."""

    def __init__(self, g: int):
        if g < 0:
            raise ValueError("genus must be nonnegative")
        self.g = g
        self.names = ("qh",) + tuple(f"a{i}" for i in range(1, g + 1)) + ("z", "uh", "vh", "t")
        self.nvars = len(self.names)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "deglex")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.zero_shift = (0,) * self.nvars

    def __repr__(self):
        return f"Ring(g={self.g})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r} for genus {self.g}") from None

    def alpha_names(self) -> tuple[str, ...]:
        return tuple(f"a{i}" for i in range(1, self.g + 1))

    # constructors returning ScalarFraction
    def const(self, c) -> "ScalarFraction":
        return ScalarFraction.from_laurent(LaurentPoly.const(self, c))

    def zero(self) -> "ScalarFraction":
        return self.const(0)

    def one(self) -> "ScalarFraction":
        return self.const(1)

    def var(self, name: str, power: int = 1) -> "ScalarFraction":
        return self.mono({name: power})

    def mono(self, exps: Mapping[str, int] | None = None, coeff=1) -> "ScalarFraction":
        return ScalarFraction.from_laurent(LaurentPoly.mono(self, exps or {}, coeff))

    def exps_vector(self, exps: Mapping[str, int]) -> tuple[int, ...]:
        v = [0] * self.nvars
        for k, e in exps.items():
            v[self.index(k)] += int(e)
        return tuple(v)


@lru_cache(maxsize=None)
def get_ring(g: int) -> Ring:
    return Ring(g)


def _monomial_poly(ctx, exps) -> flint.fmpq_mpoly:
    return ctx.term(exp_vec=tuple(exps), coeff=flint.fmpq(1))


def _split_content(poly) -> tuple[flint.fmpq_mpoly, tuple[int, ...] | None]:
    """Divide out the monomial gcd of the terms; returns (poly, exps) or (poly, None)."""
    if poly.is_zero():
        return poly, None
    tc = poly.term_content()
    exps = tc.monoms()[0]
    if any(exps):
        return poly / _monomial_poly(poly.context(), exps), tuple(exps)
    return poly, None


class LaurentPoly:
    """x^shift * poly with poly free of monomial content."""

    __slots__ = ("ring", "poly", "shift")

    def __init__(self, ring: Ring, poly, shift=None, normalized=False):
        self.ring = ring
        shift = tuple(shift) if shift is not None else ring.zero_shift
        if not normalized:
            if poly.is_zero():
                shift = ring.zero_shift
            else:
                poly, content = _split_content(poly)
                if content is not None:
                    shift = tuple(a + b for a, b in zip(shift, content))
        self.poly = poly
        self.shift = shift

    # construction
    @classmethod
    def const(cls, ring: Ring, c) -> "LaurentPoly":
        return cls(ring, ring.ctx.constant(to_fmpq(c)), normalized=True)

    @classmethod
    def mono(cls, ring: Ring, exps, coeff=1) -> "LaurentPoly":
        if isinstance(exps, Mapping):
            exps = ring.exps_vector(exps)
        c = to_fmpq(coeff)
        if c == 0:
            return cls.const(ring, 0)
        return cls(ring, ring.ctx.constant(c), tuple(exps), normalized=True)

    @classmethod
    def from_terms(cls, ring: Ring, terms: Mapping[tuple, object]) -> "LaurentPoly":
        terms = {tuple(e): to_fmpq(c) for e, c in terms.items() if c != 0}
        if not terms:
            return cls.const(ring, 0)
        lo = tuple(min(e[i] for e in terms) for i in range(ring.nvars))
        d = {tuple(a - b for a, b in zip(e, lo)): c for e, c in terms.items()}
        return cls(ring, ring.ctx.from_dict(d), lo, normalized=True)

    # queries
    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_monomial(self) -> bool:
        return len(self.poly) == 1

    def is_constant(self) -> bool:
        return self.poly.is_constant() and not any(self.shift)

    def terms(self):
        """Yield (exponent tuple, fmpq coefficient) with the shift applied."""
        s = self.shift
        for e, c in self.poly.terms():
            yield tuple(a + b for a, b in zip(e, s)), c

    def term_dict(self) -> dict:
        return dict(self.terms())

    def __len__(self):
        return len(self.poly)

    # arithmetic
    def _aligned(self, other: "LaurentPoly"):
        lo = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        ctx = self.ring.ctx
        p = self.poly
        if lo != self.shift:
            p = p * _monomial_poly(ctx, [a - b for a, b in zip(self.shift, lo)])
        q = other.poly
        if lo != other.shift:
            q = q * _monomial_poly(ctx, [a - b for a, b in zip(other.shift, lo)])
        return p, q, lo

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        p, q, lo = self._aligned(other)
        return LaurentPoly(self.ring, p + q, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, -self.poly, self.shift, normalized=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return LaurentPoly.const(self.ring, 0)
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return LaurentPoly(self.ring, self.poly * other.poly, shift, normalized=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ExactArithmeticError("negative power of a non-monomial Laurent polynomial")
            c = self.poly.leading_coefficient()
            return LaurentPoly.mono(self.ring, [-n * s for s in self.shift], 1 / c ** (-n))
        shift = tuple(n * s for s in self.shift)
        return LaurentPoly(self.ring, self.poly ** n, shift, normalized=True)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly.const(self.ring, other)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self.shift == other.shift and self.poly == other.poly

    def __hash__(self):
        return hash((self.shift, tuple((e, str(c)) for e, c in sorted(self.poly.to_dict().items()))))

    # maps
    def psi(self, n: int) -> "LaurentPoly":
        if n == 1:
            return self
        d = {tuple(n * a for a in e): c for e, c in self.poly.terms()}
        return LaurentPoly(self.ring, self.ring.ctx.from_dict(d), tuple(n * s for s in self.shift),
                           normalized=True)

    def map_monomials(self, images: list) -> "LaurentPoly":
        """Substitute each generator by a Laurent monomial given as (coeff, exps)."""
        ring = self.ring
        out: dict = {}
        for e, c in self.terms():
            coeff = c
            ex = [0] * ring.nvars
            for i, k in enumerate(e):
                if k == 0:
                    continue
                ci, ei = images[i]
                if ci != 1:
                    coeff = coeff * ci ** k if k > 0 else coeff / ci ** (-k)
                for j, v in enumerate(ei):
                    ex[j] += k * v
            key = tuple(ex)
            out[key] = out.get(key, 0) + coeff
        return LaurentPoly.from_terms(ring, out)

    def degree_range(self, name: str) -> tuple[int, int]:
        i = self.ring.index(name)
        if self.is_zero():
            return (0, 0)
        vals = [e[i] for e, _ in self.poly.terms()]
        return (min(vals) + self.shift[i], max(vals) + self.shift[i])

    def split_by(self, name: str) -> dict:
        """Group terms by the exponent of one generator: {k: coefficient LaurentPoly}."""
        i = self.ring.index(name)
        groups: dict = {}
        for e, c in self.terms():
            k = e[i]
            e2 = e[:i] + (0,) + e[i + 1:]
            groups.setdefault(k, {})[e2] = c
        return {k: LaurentPoly.from_terms(self.ring, d) for k, d in groups.items()}

    def to_text(self) -> str:
        return _poly_text(self.ring, self.terms())

    def __repr__(self):
        return f"LaurentPoly({self.to_text()})"


def _mono_text(names, e) -> str:
    parts = []
    for n, k in zip(names, e):
        if k == 1:
            parts.append(n)
        elif k != 0:
            parts.append(f"{n}^{k}")
    return "*".join(parts)


def _glex_key(e):
    return (-sum(e), tuple(-k for k in e))


def _poly_text(ring: Ring, terms: Iterable) -> str:
    """Canonical text: graded-lexicographic order over the generator list."""
    items = sorted(terms, key=lambda t: _glex_key(t[0]))
    if not items:
        return "0"
    out = []
    for idx, (e, c) in enumerate(items):
        m = _mono_text(ring.names, e)
        neg = c < 0
        a = -c if neg else c
        if m:
            body = m if a == 1 else f"{_frac_text(a)}*{m}"
        else:
            body = _frac_text(a)
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


class ScalarFraction:
    """x^shift * num / den with num, den coprime polynomials (den monic)."""

    __slots__ = ("ring", "num", "den", "shift")

    def __init__(self, ring: Ring, num, den, shift):
        # internal: callers go through _make
        self.ring = ring
        self.num = num
        self.den = den
        self.shift = shift

    @staticmethod
    def _make(ring: Ring, num, den, shift, reduce=None) -> "ScalarFraction":
        ctx = ring.ctx
        if den.is_zero():
            raise ExactArithmeticError("division by zero fraction")
        if num.is_zero():
            return ScalarFraction(ring, num, ctx.constant(1), ring.zero_shift)
        num, c1 = _split_content(num)
        den, c2 = _split_content(den)
        if c1 is not None or c2 is not None:
            c1 = c1 or ring.zero_shift
            c2 = c2 or ring.zero_shift
            shift = tuple(s + a - b for s, a, b in zip(shift, c1, c2))
        if (_FULL_REDUCTION if reduce is None else reduce) and not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            den = den / lc
            num = num / lc
        return ScalarFraction(ring, num, den, tuple(shift))

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "ScalarFraction":
        return cls(p.ring, p.poly, p.ring.ctx.constant(1), p.shift if not p.is_zero() else p.ring.zero_shift)

    @classmethod
    def from_parts(cls, num: LaurentPoly, den: LaurentPoly) -> "ScalarFraction":
        if den.is_zero():
            raise ExactArithmeticError("division by zero fraction")
        shift = tuple(a - b for a, b in zip(num.shift, den.shift))
        return cls._make(num.ring, num.poly, den.poly, shift)

    # views
    def numerator(self) -> LaurentPoly:
        return LaurentPoly(self.ring, self.num, self.shift, normalized=True)

    def denominator(self) -> LaurentPoly:
        return LaurentPoly(self.ring, self.den, normalized=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        """True when the (reduced) denominator is a unit."""
        return self.den.is_constant() or self.reduced().den.is_constant()

    def is_one(self) -> bool:
        return self.den.is_constant() and self.num.is_one() and not any(self.shift)

    def reduced(self) -> "ScalarFraction":
        if _FULL_REDUCTION:
            return self
        return ScalarFraction._make(self.ring, self.num, self.den, self.shift, reduce=True)

    def as_laurent(self) -> LaurentPoly:
        r = self.reduced()
        if not r.den.is_constant():
            raise ValueError("fraction has a non-monomial denominator")
        return LaurentPoly(self.ring, r.num / r.den, r.shift)

    def is_monomial(self) -> bool:
        return self.den.is_constant() and len(self.num) == 1

    # arithmetic
    def _coerce(self, other) -> "ScalarFraction":
        if isinstance(other, ScalarFraction):
            return other
        if isinstance(other, LaurentPoly):
            return ScalarFraction.from_laurent(other)
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        ring = self.ring
        ctx = ring.ctx
        lo = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        p1 = self.num
        if lo != self.shift:
            p1 = p1 * _monomial_poly(ctx, [a - b for a, b in zip(self.shift, lo)])
        p2 = other.num
        if lo != other.shift:
            p2 = p2 * _monomial_poly(ctx, [a - b for a, b in zip(other.shift, lo)])
        if self.den == other.den:
            return ScalarFraction._make(ring, p1 + p2, self.den, lo)
        if self.den.is_constant():
            return ScalarFraction._make(ring, p1 * other.den + p2, other.den, lo)
        if other.den.is_constant():
            return ScalarFraction._make(ring, p1 + p2 * self.den, self.den, lo)
        g = self.den.gcd(other.den) if _FULL_REDUCTION else ctx.constant(1)
        d1 = self.den / g
        d2 = other.den / g
        return ScalarFraction._make(ring, p1 * d2 + p2 * d1, self.den * d2, lo)

    __radd__ = __add__

    def __neg__(self):
        return ScalarFraction(self.ring, -self.num, self.den, self.shift)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        ring = self.ring
        if self.is_zero() or other.is_zero():
            return ring.zero()
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        a_const = self.den.is_constant()
        b_const = other.den.is_constant()
        if a_const and b_const:
            return ScalarFraction(ring, self.num * other.num, self.den, shift)
        if not _FULL_REDUCTION:
            return ScalarFraction._make(ring, self.num * other.num, self.den * other.den, shift)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if not b_const:
            g = n1.gcd(d2)
            if not g.is_constant():
                n1, d2 = n1 / g, d2 / g
        if not a_const:
            g = n2.gcd(d1)
            if not g.is_constant():
                n2, d1 = n2 / g, d1 / g
        return ScalarFraction._make(ring, n1 * n2, d1 * d2, shift, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarFraction":
        if self.is_zero():
            raise ExactArithmeticError("division by zero fraction")
        shift = tuple(-s for s in self.shift)
        return ScalarFraction._make(self.ring, self.den, self.num, shift, reduce=False)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return self.ring.one()
        if n < 0:
            return self.inverse() ** (-n)
        shift = tuple(n * s for s in self.shift)
        return ScalarFraction(self.ring, self.num ** n, self.den ** n, shift)

    def mul_monomial(self, coeff, exps) -> "ScalarFraction":
        """Fast multiplication by coeff * x^exps."""
        c = to_fmpq(coeff)
        if c == 0 or self.is_zero():
            return self.ring.zero()
        shift = tuple(a + b for a, b in zip(self.shift, exps))
        return ScalarFraction(self.ring, self.num * c, self.den, shift)

    # comparison
    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        # cross multiplication, independent of reduction state
        ctx = self.ring.ctx
        lo = tuple(min(a, b) for a, b in zip(self.shift, other.shift))
        p1 = self.num * other.den
        if lo != self.shift:
            p1 = p1 * _monomial_poly(ctx, [a - b for a, b in zip(self.shift, lo)])
        p2 = other.num * self.den
        if lo != other.shift:
            p2 = p2 * _monomial_poly(ctx, [a - b for a, b in zip(other.shift, lo)])
        return p1 == p2

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        r = self.reduced()
        return hash((r.shift, _poly_text(r.ring, r.num.terms()), _poly_text(r.ring, r.den.terms())))

    # maps
    def psi(self, n: int) -> "ScalarFraction":
        """Adams operation: every generator x goes to x^n."""
        if n < 1:
            raise ValueError("Adams operations need n >= 1")
        if n == 1 or self.is_zero():
            return self
        ctx = self.ring.ctx
        num = ctx.from_dict({tuple(n * a for a in e): c for e, c in self.num.terms()})
        den = ctx.from_dict({tuple(n * a for a in e): c for e, c in self.den.terms()})
        # a scaled monic polynomial stays monic and coprimality is preserved
        return ScalarFraction(self.ring, num, den, tuple(n * s for s in self.shift))

    def substitute(self, assignment: Mapping[str, object], target: Ring | None = None) -> "ScalarFraction":
        return substitute(self, assignment, target)

    def degree_range(self, name: str) -> tuple[int, int]:
        return self.numerator().degree_range(name)

    def to_text(self) -> str:
        r = self.reduced()
        n = _poly_text(r.ring, LaurentPoly(r.ring, r.num, r.shift, normalized=True).terms())
        if r.den.is_one():
            return n
        d = _poly_text(r.ring, r.den.terms())
        return f"({n})/({d})"

    def to_struct(self) -> dict:
        """JSON-friendly structure (exponent vectors with rational strings)."""
        r = self.reduced()
        num = LaurentPoly(r.ring, r.num, r.shift, normalized=True)
        key = lambda t: _glex_key(t[0])
        return {
            "num": [[[int(x) for x in e], _frac_text(c)] for e, c in sorted(num.terms(), key=key)],
            "den": [[[int(x) for x in e], _frac_text(c)] for e, c in sorted(r.den.terms(), key=key)],
        }

    @classmethod
    def from_struct(cls, ring: Ring, data: Mapping) -> "ScalarFraction":
        num = LaurentPoly.from_terms(ring, {tuple(e): to_fmpq(c) for e, c in data["num"]})
        den = LaurentPoly.from_terms(ring, {tuple(e): to_fmpq(c) for e, c in data["den"]})
        return cls.from_parts(num, den)

    def __repr__(self):
        return f"ScalarFraction({self.to_text()})"


def _as_fraction(ring: Ring, v) -> ScalarFraction:
    if isinstance(v, ScalarFraction):
        return v
    if isinstance(v, LaurentPoly):
        return ScalarFraction.from_laurent(v)
    return ring.const(v)


def _evaluate(poly, images: list, ring: Ring) -> ScalarFraction:
    """Evaluate an fmpq_mpoly at fraction-valued images of every generator."""
    total = ring.zero()
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = images[i] ** k
        return cache[key]

    for e, c in poly.terms():
        t = ring.const(c)
        for i, k in enumerate(e):
            if k:
                t = t * power(i, k)
        total = total + t
    return total


def substitute(f: ScalarFraction, assignment: Mapping[str, object], target: Ring | None = None) -> ScalarFraction:
    """Image of f under the ring map sending each named generator to the given value.

    Unassigned generators map to themselves (in the target ring).
    """
    src = f.ring
    dst = target or src
    images = []
    for name in src.names:
        if name in assignment:
            images.append(_as_fraction(dst, assignment[name]))
        else:
            images.append(dst.var(name))
    for v in images:
        if v.ring is not dst:
            raise ValueError("substitution images must live in the target ring")
    if all(v.is_monomial() for v in images):
        mono = []
        for v in images:
            (e, c), = list(LaurentPoly(dst, v.num, v.shift, normalized=True).terms())
            mono.append((c, e))
        num = LaurentPoly(src, f.num, f.shift, normalized=True).map_monomials(mono) if src is dst else \
            _map_across(src, dst, f.num, f.shift, mono)
        den = LaurentPoly(src, f.den, normalized=True).map_monomials(mono) if src is dst else \
            _map_across(src, dst, f.den, src.zero_shift, mono)
        if den.is_zero():
            raise ExactArithmeticError(_vanishing_message(f, assignment))
        return ScalarFraction.from_parts(num, den)
    num = _evaluate(f.num, images, dst)
    den = _evaluate(f.den, images, dst)
    if den.is_zero():
        raise ExactArithmeticError(_vanishing_message(f, assignment))
    shift_val = dst.one()
    for i, k in enumerate(f.shift):
        if k:
            shift_val = shift_val * images[i] ** k
    return num * shift_val / den


def _map_across(src: Ring, dst: Ring, poly, shift, mono) -> LaurentPoly:
    out: dict = {}
    for e, c in poly.terms():
        e = tuple(a + b for a, b in zip(e, shift))
        coeff = c
        ex = [0] * dst.nvars
        for i, k in enumerate(e):
            if k == 0:
                continue
            ci, ei = mono[i]
            if ci != 1:
                coeff = coeff * ci ** k if k > 0 else coeff / ci ** (-k)
            for j, v in enumerate(ei):
                ex[j] += k * v
        key = tuple(ex)
        out[key] = out.get(key, 0) + coeff
    return LaurentPoly.from_terms(dst, out)


def _vanishing_message(f: ScalarFraction, assignment) -> str:
    ring = f.ring
    names = []
    try:
        _, factors = f.den.factor()
    except Exception:  # pragma: no cover - factoring is best effort
        factors = [(f.den, 1)]
    for fac, _ in factors:
        piece = ScalarFraction(ring, fac, ring.ctx.constant(1), ring.zero_shift)
        try:
            img = substitute(piece, assignment)
        except ExactArithmeticError:
            img = None
        if img is None or img.is_zero():
            names.append(_poly_text(ring, fac.terms()))
    return "substitution sends a denominator factor to zero: " + (", ".join(names) or "<unknown>")
