"""Generating functions Omega^univ, Omega^HLV, Omega^Sch and the DT kernels.

Every partition contributes a term of the form

    scalar(qh, alpha, z) / prod_b (1 - c_b x^{e_b})^{m_b} * prod_x H~_mu(w_x; ., q)

with Laurent-polynomial scalar and binomial denominators.  The term is kept
in this factored form (a FactoredTerm) and only expanded in z at the end,
each binomial with positive z-exponent becoming a truncated geometric series
and the z-free ones staying in the denominator.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exactalg import LaurentPoly, Ring, ScalarFraction, get_ring, to_fmpq
from .partition import Partition, partitions_of
from .series import (
    Grading,
    GradedSeries,
    _trunc,
    pleth_log,
    tail_ok,
)
from .symfunc import hhl_modified_macdonald

log = logging.getLogger(__name__)

__all__ = [
    "GenFunParams",
    "FactoredTerm",
    "l_univ",
    "n_mu_factors",
    "f_mu",
    "univ_term",
    "hlv_term",
    "sch_term",
    "omega_univ",
    "omega_hlv",
    "omega_sch",
    "omega_sch_term",
    "dt_kernels",
    "check_mellit",
    "substitution_identity",
    "check_admissible",
    "MAX_F_LENGTH",
]

MAX_F_LENGTH = 6


@dataclass(frozen=True)
class GenFunParams:
    g: int
    points: tuple = ()
    delta: int = 0
    r_max: int = 2
    z_max: int = 40

    def __post_init__(self):
        if self.g < 0 or self.delta < 0:
            raise ValueError("genus and delta must be nonnegative")
        if self.r_max < 0 or self.z_max < 0:
            raise ValueError("truncation must be nonnegative")
        object.__setattr__(self, "points", tuple(self.points))
        if len(set(self.points)) != len(self.points):
            raise ValueError("repeated point in D")

    @property
    def ring(self) -> Ring:
        return get_ring(self.g)

    @property
    def grading(self) -> Grading:
        return Grading(self.points, nflags=max(self.r_max, 1))

    @property
    def experimental(self) -> bool:
        return self.g == 0

    def to_struct(self) -> dict:
        return {"g": self.g, "points": list(self.points), "delta": self.delta,
                "r_max": self.r_max, "z_max": self.z_max}


# ----------------------------------------------------------------------
# monomials and binomials
#
# A monomial is (coeff, exps) with coeff an fmpq and exps a full exponent
# vector of the ring.  A binomial key (c, exps) stands for 1 - c*x^exps and
# is canonical: the z-exponent is positive, or it is zero and the exponent
# vector is lexicographically positive.


def _mono(ring: Ring, coeff=1, **exps) -> tuple:
    return (to_fmpq(coeff), ring.exps_vector(exps))


def _mono_mul(a, b):
    return (a[0] * b[0], tuple(x + y for x, y in zip(a[1], b[1])))


def _mono_inv(a):
    return (1 / a[0], tuple(-x for x in a[1]))


def _mono_pow(a, n: int):
    if n >= 0:
        return (a[0] ** n, tuple(n * x for x in a[1]))
    return _mono_pow(_mono_inv(a), -n)


def _mono_poly(ring: Ring, a) -> LaurentPoly:
    return LaurentPoly.mono(ring, a[1], a[0])


def _lex_positive(e: tuple) -> bool:
    for x in e:
        if x:
            return x > 0
    return False


def _binomial_key(c, e: tuple):
    return (Fraction(int(c.p), int(c.q)), tuple(e))


def _binomial_poly(ring: Ring, key) -> LaurentPoly:
    c, e = key
    return LaurentPoly.from_terms(ring, {ring.zero_shift: 1, e: -c})


class FactoredTerm:
    """num / prod over binomial keys of (1 - c x^e)^mult."""

    __slots__ = ("ring", "num", "dens")

    def __init__(self, ring: Ring, num: LaurentPoly | None = None, dens: Counter | None = None):
        self.ring = ring
        self.num = num if num is not None else LaurentPoly.const(ring, 1)
        self.dens = Counter(dens or {})

    def copy(self) -> "FactoredTerm":
        return FactoredTerm(self.ring, self.num, Counter(self.dens))

    def mul(self, p) -> "FactoredTerm":
        if isinstance(p, FactoredTerm):
            return FactoredTerm(self.ring, self.num * p.num, self.dens + p.dens)
        if isinstance(p, tuple):
            p = _mono_poly(self.ring, p)
        return FactoredTerm(self.ring, self.num * p, self.dens)

    def mul_factor(self, m1, m2) -> "FactoredTerm":
        """Multiply by (m1 - m2) for monomials m1, m2."""
        ring = self.ring
        return self.mul(_mono_poly(ring, m1) - _mono_poly(ring, m2))

    def div_factor(self, m1, m2) -> "FactoredTerm":
        """Divide by (m1 - m2) for monomials m1, m2."""
        unit, key = canonical_binomial(self.ring, m1, m2)
        out = self.mul(_mono_inv(unit))
        out.dens[key] += 1
        return out

    def to_fraction(self) -> ScalarFraction:
        ring = self.ring
        den = LaurentPoly.const(ring, 1)
        for key, m in self.dens.items():
            den = den * _binomial_poly(ring, key) ** m
        return ScalarFraction.from_parts(self.num, den)

    def expand(self, z_max: int) -> ScalarFraction:
        """z-expansion up to z^z_max as a fraction with z-free denominator."""
        ring = self.ring
        zi = ring.index("z")
        if self.num.is_zero():
            return ring.zero()
        lo, _ = self.num.degree_range("z")
        budget = z_max - min(lo, 0)
        zfree = LaurentPoly.const(ring, 1)
        series = ScalarFraction.from_laurent(LaurentPoly.const(ring, 1))
        for key, m in sorted(self.dens.items()):
            c, e = key
            k = e[zi]
            if k == 0:
                zfree = zfree * _binomial_poly(ring, key) ** m
                continue
            terms = {}
            for n in range(budget // k + 1):
                terms[tuple(n * x for x in e)] = Fraction(comb(n + m - 1, m - 1)) * c ** n
            geo = ScalarFraction.from_laurent(LaurentPoly.from_terms(ring, terms))
            series = _trunc(series * geo, zi, budget)
        prod = ScalarFraction.from_laurent(self.num) * series
        lo2 = prod.shift[zi]
        if lo2 < 0:
            # negative z-powers must cancel; anything left is a genuine error
            low = {d: c for d, c in _split_z_laurent(prod, zi).items() if d < 0}
            if low:
                raise AssertionError(f"negative powers of z survive the expansion: {sorted(low)}")
        prod = _drop_negative(prod, zi)
        prod = _trunc(prod, zi, z_max)
        return prod / ScalarFraction.from_laurent(zfree)


def _split_z_laurent(f: ScalarFraction, zi: int) -> dict:
    groups: dict = {}
    for e, c in f.num.terms():
        d = e[zi] + f.shift[zi]
        groups[d] = groups.get(d, 0) + 1
    return groups


def _drop_negative(f: ScalarFraction, zi: int) -> ScalarFraction:
    if f.is_zero() or f.shift[zi] >= 0:
        return f
    ring = f.ring
    keep = {}
    for e, c in f.num.terms():
        e2 = tuple(a + b for a, b in zip(e, f.shift))
        if e2[zi] >= 0:
            keep[e2] = c
    num = LaurentPoly.from_terms(ring, keep)
    return ScalarFraction.from_laurent(num) / ScalarFraction(ring, f.den, ring.ctx.constant(1), ring.zero_shift)


def canonical_binomial(ring: Ring, m1, m2):
    """Write m1 - m2 = unit * (1 - c x^e) with (c, e) canonical."""
    zi = ring.index("z")
    if m1[0] == 0 or m2[0] == 0:
        raise ValueError("binomial with a vanishing monomial")
    ratio = _mono_mul(m2, _mono_inv(m1))  # m1 - m2 = m1 (1 - m2/m1)
    unit = m1
    k = ratio[1][zi]
    if k < 0 or (k == 0 and not _lex_positive(ratio[1])):
        # m1 - m2 = -m2 (1 - m1/m2)
        unit = (-m2[0], m2[1])
        ratio = _mono_inv(ratio)
    if not any(ratio[1]):
        raise ValueError("binomial factor is a constant")
    return unit, _binomial_key(ratio[0], ratio[1])


# ----------------------------------------------------------------------
# building blocks


def l_univ(ring: Ring, x=None) -> LaurentPoly:
    """L^univ evaluated at the monomial x (default z): prod_i (1 - a_i x)(1 - q a_i^{-1} x)."""
    if x is None:
        x = _mono(ring, z=1)
    out = LaurentPoly.const(ring, 1)
    one = _mono(ring)
    for a in ring.alpha_names():
        out = out * (_mono_poly(ring, one) - _mono_poly(ring, _mono_mul(_mono(ring, **{a: 1}), x)))
        out = out * (_mono_poly(ring, one) - _mono_poly(ring, _mono_mul(_mono(ring, qh=2, **{a: -1}), x)))
    return out


def n_mu_factors(mu: Partition, ring: Ring, u) -> list:
    """N_mu(u; z, q) as a list of (m1, m2) factors (m1 - m2), u a monomial."""
    out = []
    u_inv = _mono_inv(u)
    for a, l in mu.arms_legs():
        out.append((_mono(ring, z=a), _mono_mul(u, _mono(ring, qh=2 * (1 + l)))))
        out.append((_mono(ring, z=a + 1), _mono_mul(u_inv, _mono(ring, qh=2 * l))))
    return out


def _n_ratio(mu: Partition, ring: Ring) -> FactoredTerm:
    t = FactoredTerm(ring)
    for a in ring.alpha_names():
        for m1, m2 in n_mu_factors(mu, ring, _mono(ring, **{a: -1})):
            t = t.mul_factor(m1, m2)
    for m1, m2 in n_mu_factors(mu, ring, _mono(ring)):
        t = t.div_factor(m1, m2)
    return t


def _f_block(ring: Ring, zs: list) -> FactoredTerm:
    """The summand of f for the variables in the given order."""
    n = len(zs)
    one = _mono(ring)
    q = _mono(ring, qh=2)
    alphas_inv = [_mono(ring, **{a: -1}) for a in ring.alpha_names()]
    t = FactoredTerm(ring)
    for i in range(n):
        for j in range(i):
            ratio = _mono_mul(zs[i], _mono_inv(zs[j]))
            t = t.div_factor(one, ratio)
            for ai in alphas_inv:
                t = t.mul_factor(one, _mono_mul(ai, ratio))
                t = t.div_factor(one, _mono_mul(_mono_mul(q, ai), ratio))
            if i > j + 1:
                t = t.mul_factor(one, _mono_mul(q, ratio))
    for i in range(1, n):
        t = t.mul_factor(one, zs[i])
    return t


def _cancel(ring: Ring, num: LaurentPoly, dens: Counter) -> tuple:
    dens = Counter(dens)
    for key in sorted(dens):
        bl = _binomial_poly(ring, key)
        b = bl.poly
        while dens[key] and not num.is_zero():
            try:
                quo = num.poly / b
            except Exception:
                break
            num = LaurentPoly(ring, quo, tuple(x - y for x, y in zip(num.shift, bl.shift)))
            dens[key] -= 1
    return num, +dens


@lru_cache(maxsize=None)
def _f_mu_cached(parts: tuple, g: int) -> FactoredTerm:
    ring = get_ring(g)
    mu = Partition(parts)
    n = len(mu)
    one = _mono(ring)
    zs = [_mono(ring, qh=2 * (-n + i), z=mu[i - 1]) for i in range(1, n + 1)]
    pre = FactoredTerm(ring)
    for a in ring.alpha_names():
        ai = _mono(ring, **{a: -1})
        for zi in zs:
            pre = pre.mul_factor(one, ai).div_factor(one, _mono_mul(ai, zi))
    blocks = [_f_block(ring, [zs[s] for s in perm]) for perm in itertools.permutations(range(n))]
    common = Counter()
    for b in blocks:
        common |= b.dens
    total = LaurentPoly.const(ring, 0)
    for b in blocks:
        extra = common - b.dens
        part = b.num
        for key, m in extra.items():
            part = part * _binomial_poly(ring, key) ** m
        total = total + part
    num, dens = _cancel(ring, total, common)
    out = pre.mul(FactoredTerm(ring, num, dens))
    num, dens = _cancel(ring, out.num, out.dens)
    return FactoredTerm(ring, num, dens)


def f_mu(mu, g: int) -> FactoredTerm:
    """f evaluated at z_i = q^{-l(mu)+i} z^{mu_i}, in factored form."""
    mu = Partition(mu)
    if len(mu) > MAX_F_LENGTH:
        from .symfunc import ResourceLimitError
        raise ResourceLimitError(f"length {len(mu)} exceeds the bound {MAX_F_LENGTH}")
    return _f_mu_cached(tuple(mu), g).copy()


def _signed_qh(ring: Ring, power: int):
    """(-qh)^power as a monomial."""
    return (to_fmpq(-1 if power % 2 else 1), ring.exps_vector({"qh": power}))


def univ_term(mu, g: int, delta: int) -> FactoredTerm:
    """Scalar part of the mu-term of Omega^univ (without w and H~)."""
    ring = get_ring(g)
    mu = Partition(mu)
    t = FactoredTerm(ring).mul(_signed_qh(ring, (2 * g + delta) * mu.pairing(mu)))
    t = t.mul(_mono(ring, z=2 * delta * mu.conjugate().n()))
    for a, l in mu.arms_legs():
        t = t.mul(l_univ(ring, _mono(ring, z=2 * a + 1, qh=-2 * l - 2)))
        t = t.div_factor(_mono(ring, z=2 * a + 2), _mono(ring, qh=2 * l))
        t = t.div_factor(_mono(ring, z=2 * a), _mono(ring, qh=2 * l + 2))
    return t


def hlv_term(mu, g: int, delta: int) -> FactoredTerm:
    ring = get_ring(g)
    mu = Partition(mu)
    sign = -1 if (delta * mu.size) % 2 else 1
    t = FactoredTerm(ring).mul(_mono(ring, sign, qh=2 * delta * mu.n(), z=delta * mu.conjugate().n()))
    return t.mul(_n_ratio(mu, ring))


def sch_term(mu, g: int, delta: int) -> FactoredTerm:
    ring = get_ring(g)
    mu = Partition(mu)
    t = FactoredTerm(ring).mul(_signed_qh(ring, delta * mu.pairing(mu)))
    t = t.mul(_mono(ring, z=delta * mu.conjugate().n()))
    t = t.mul(f_mu(mu, g)).mul(_n_ratio(mu, ring))
    num, dens = _cancel(ring, t.num, t.dens)
    return FactoredTerm(ring, num, dens)


# ----------------------------------------------------------------------
# series


def h_coefficient(ring: Ring, mu: Partition, flags_per_point, zpow: int, qvar=None) -> LaurentPoly:
    """prod_x [coefficient of w_x^{flags} in H~_mu(w_x; z^zpow, q)].

    qvar gives the image of q as {generator: exponent}; default q = qh^2.
    """
    H = hhl_modified_macdonald(mu)
    zi = ring.index("z")
    qvar = [(ring.index(k), e) for k, e in (qvar or {"qh": 2}).items()]
    out = LaurentPoly.const(ring, 1)
    for flags in flags_per_point:
        c = H.coefficient(flags)
        if not c:
            return LaurentPoly.const(ring, 0)
        terms = {}
        for (i, j), v in c.items():
            e = [0] * ring.nvars
            e[zi] = zpow * i
            for qi, k in qvar:
                e[qi] = k * j
            terms[tuple(e)] = v
        out = out * LaurentPoly.from_terms(ring, terms)
    return out


def _vectors_of_rank(grading: Grading, r: int) -> list:
    def comps(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in comps(total - first, parts - 1):
                yield (first,) + rest

    pieces = [list(comps(r, hi - lo)) for lo, hi in grading.point_slices()]
    out = []
    for combo in itertools.product(*pieces):
        out.append((r,) + tuple(x for p in combo for x in p))
    return out


def _build(p: GenFunParams, term_fn, zpow: int, cap=None, grading=None, mus=None, qvar=None) -> GradedSeries:
    ring = p.ring
    grading = grading or p.grading
    if grading.points != p.points:
        raise ValueError("grading points differ from the parameters")
    zi = ring.index("z")
    s = GradedSeries.one(ring, grading, p.r_max, p.z_max, cap=cap)
    if mus is not None and Partition(()) not in mus:
        s.data = {}
    for m in range(1, p.r_max + 1):
        vecs = [v for v in _vectors_of_rank(grading, m) if s.admits(v)]
        if not vecs:
            continue
        for mu in partitions_of(m):
            if mus is not None and mu not in mus:
                continue
            base = term_fn(mu, p.g, p.delta).expand(p.z_max)
            if base.is_zero():
                continue
            cache = {}
            for vec in vecs:
                flags = tuple(tuple(sorted((x for x in vec[lo:hi] if x), reverse=True))
                              for lo, hi in grading.point_slices())
                if flags not in cache:
                    hc = h_coefficient(ring, mu, flags, zpow, qvar)
                    cache[flags] = ring.zero() if hc.is_zero() else \
                        _trunc(base * ScalarFraction.from_laurent(hc), zi, p.z_max)
                val = cache[flags]
                if val.is_zero():
                    continue
                s.data[vec] = s.data[vec] + val if vec in s.data else val
    s.data = {k: v for k, v in s.data.items() if not v.is_zero()}
    return s


def omega_univ(p: GenFunParams, cap=None, grading=None) -> GradedSeries:
    return _build(p, univ_term, 2, cap, grading)


def omega_hlv(p: GenFunParams, cap=None, grading=None) -> GradedSeries:
    return _build(p, hlv_term, 1, cap, grading)


def omega_sch(p: GenFunParams, cap=None, grading=None) -> GradedSeries:
    return _build(p, sch_term, 1, cap, grading)


def omega_sch_term(p: GenFunParams, mu, cap=None, grading=None) -> GradedSeries:
    """The single-partition summand of Omega^Sch; mu = () gives 1."""
    return _build(p, sch_term, 1, cap, grading, mus={Partition(mu)})


def _one_minus_z(ring: Ring, k: int) -> ScalarFraction:
    return ring.one() - ring.var("z", k)


def dt_kernels(p: GenFunParams, cap=None, grading=None) -> dict:
    """{"H_univ": (1 - z^2) Log Omega^univ, "H_sch": (1 - z) Log Omega^Sch}."""
    ring = p.ring
    hu = pleth_log(omega_univ(p, cap, grading)).scale(_one_minus_z(ring, 2))
    hs = pleth_log(omega_sch(p, cap, grading)).scale(_one_minus_z(ring, 1))
    return {"H_univ": hu, "H_sch": hs}


def check_mellit(p: GenFunParams, window: int = 5, kernels: dict | None = None) -> dict:
    """Compare both kernels at z = 1 for every gamma; returns a report dict."""
    kernels = kernels or dt_kernels(p)
    hu, hs = kernels["H_univ"], kernels["H_sch"]
    grading = hu.grading
    rows = []
    status = "equal"
    for r in range(1, p.r_max + 1):
        for vec in _vectors_of_rank(grading, r):
            ok_u = tail_ok(hu, vec, window)
            ok_s = tail_ok(hs, vec, window)
            ring_zero = p.ring.zero()
            vu = hu.data.get(vec, ring_zero).substitute({"z": 1}) if ok_u else None
            vs = hs.data.get(vec, ring_zero).substitute({"z": 1}) if ok_s else None
            if not (ok_u and ok_s):
                st = "inconclusive"
            else:
                st = "equal" if vu == vs else "unequal"
            if st == "unequal":
                status = "unequal"
            elif st == "inconclusive" and status == "equal":
                status = "inconclusive"
            rows.append({
                "gamma": grading.gamma(vec).to_struct(),
                "status": st,
                "H_univ": vu.to_text() if vu is not None else None,
                "H_sch": vs.to_text() if vs is not None else None,
                "tail_ok": {"H_univ": ok_u, "H_sch": ok_s},
            })
    return {
        "params": p.to_struct(),
        "window": window,
        "status": status,
        "experimental": p.experimental,
        "gammas": rows,
    }


def substitution_identity(mu, g: int, delta: int) -> tuple:
    """Both sides of the per-mu substitution identity.

    Left: the Omega^univ term with w -> w q^(-delta/2).  Right: the Omega^HLV
    term with alpha_i -> alpha_i z and z -> z^2.  The H~ factors agree on the
    nose, so only the scalar parts are compared.
    """
    ring = get_ring(g)
    mu = Partition(mu)
    lhs = univ_term(mu, g, delta).to_fraction() * ring.mono({"qh": -delta * mu.size})
    z = ring.var("z")
    assign = {"z": ring.var("z", 2)}
    assign.update({a: ring.var(a) * z for a in ring.alpha_names()})
    rhs = hlv_term(mu, g, delta).to_fraction().substitute(assign)
    return lhs, rhs


def check_admissible(p: GenFunParams) -> list:
    """Gamma vectors where (q - 1)(1 - z) Log Omega^HLV keeps a denominator."""
    ring = p.ring
    A = pleth_log(omega_hlv(p)).scale((ring.var("qh", 2) - 1) * (1 - ring.var("z")))
    return sorted(v for v, c in A.data.items() if not c.is_laurent())
