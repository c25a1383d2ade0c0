"""Moduli-side data and the drivers that turn kernels into stack classes.

A query fixes the genus, a divisor D = sum n_x x together with a level
D' = sum n'_x x <= D, a class gamma, a degree d, the scalar eps, a formal
normal form zeta and (optionally) parabolic weights sigma.  The drivers
read off the motivic class of the corresponding stack as a coefficient of
a plethystic exponential of the DT kernel, either at z = 1 (``conn_class``)
or z-graded with a twist by N (``graded_class``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .exactalg import ScalarFraction, get_ring
from .genfun import GenFunParams, _vectors_of_rank, dt_kernels, omega_sch, omega_sch_term
from .partition import Partition
from .series import (
    GammaExponent,
    Grading,
    GradedSeries,
    TruncationError,
    coefficient,
    eval_z_one,
    filter_terms,
    pleth_exp,
    pleth_log,
)

log = logging.getLogger(__name__)

__all__ = [
    "KINDS",
    "DivisorSpec",
    "NormalForm",
    "Weights",
    "StackQuery",
    "Truncation",
    "InadmissibleClassError",
    "class_predicates",
    "star",
    "chi",
    "euler_pairing",
    "twist",
    "stabilization_bound",
    "conn_class",
    "graded_class",
    "stabilized_graded_class",
    "nilpotent_pair_class",
    "ddp_dimension",
    "ddp_query",
    "ddp_poincare",
    "set_kernel_source",
]

KINDS = ("full", "semistable-full", "semistable-partial", "nonpositive-graded")
SAFETY_MARGIN = 1


class InadmissibleClassError(ValueError):
    """The class is not in the monoid of admissible classes for zeta."""


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ----------------------------------------------------------------------
# data


@dataclass(frozen=True)
class DivisorSpec:
    """Multiplicities (n_x, n'_x) per point, in a fixed point order."""

    entries: tuple  # ((x, n, n_prime), ...)

    @classmethod
    def make(cls, data) -> "DivisorSpec":
        """From {x: n}, {x: (n, n')} or an iterable of "x:n[:n']" strings."""
        if isinstance(data, Mapping):
            items = []
            for x, v in data.items():
                n, np_ = (v, v) if isinstance(v, int) else tuple(v)
                items.append((str(x), n, np_))
        else:
            items = [cls._parse_entry(e) if isinstance(e, str) else (str(e[0]), e[1], e[2] if len(e) > 2 else e[1])
                     for e in data]
        seen = set()
        for x, n, np_ in items:
            if x in seen:
                raise ValueError(f"point {x!r} listed twice")
            seen.add(x)
            if int(n) != n or n < 1:
                raise ValueError(f"n_{x} must be a positive integer, got {n}")
            if int(np_) != np_ or not 0 <= np_ <= n:
                raise ValueError(f"n'_{x} must satisfy 0 <= n' <= n, got {np_}")
        return cls(tuple((x, int(n), int(np_)) for x, n, np_ in items))

    @staticmethod
    def _parse_entry(text: str) -> tuple:
        bits = text.split(":")
        if len(bits) not in (2, 3) or not bits[0]:
            raise ValueError(f"malformed divisor entry {text!r}; expected x:n[:n']")
        try:
            n = int(bits[1])
            np_ = int(bits[2]) if len(bits) == 3 else n
        except ValueError:
            raise ValueError(f"malformed divisor entry {text!r}") from None
        return bits[0], n, np_

    @property
    def support(self) -> tuple:
        return tuple(x for x, _, _ in self.entries)

    @property
    def support_prime(self) -> tuple:
        return tuple(x for x, _, np_ in self.entries if np_ > 0)

    def n(self, x) -> int:
        return self._entry(x)[1]

    def n_prime(self, x) -> int:
        return self._entry(x)[2]

    def _entry(self, x):
        for e in self.entries:
            if e[0] == x:
                return e
        raise KeyError(f"point {x!r} is not in the divisor")

    @property
    def degree(self) -> int:
        return sum(n for _, n, _ in self.entries)

    @property
    def degree_prime(self) -> int:
        return sum(np_ for _, _, np_ in self.entries)

    @property
    def is_full_level(self) -> bool:
        return all(n == np_ for _, n, np_ in self.entries)

    @property
    def delta(self) -> int:
        """deg D - |D'|; equals deg D - |D| when D' = D."""
        return self.degree - len(self.support_prime)

    def full(self) -> "DivisorSpec":
        """Same divisor with the level raised to D' = D."""
        return DivisorSpec(tuple((x, n, n) for x, n, _ in self.entries))

    def to_struct(self) -> list:
        return [[x, n, np_] for x, n, np_ in self.entries]


@dataclass(frozen=True)
class NormalForm:
    """zeta_{x,j} as coefficient vectors, deepest pole first.

    The vector at x has length n'_x; the last entry is the residue when
    n'_x = n_x.
    """

    coeffs: tuple  # (((x, j), (c_1, ..., c_k)), ...)
    orders: tuple = ()  # ((x, n_x), ...); residues need n'_x = n_x

    @classmethod
    def make(cls, data: Mapping, divisor: DivisorSpec | None = None) -> "NormalForm":
        items = []
        for key, vec in data.items():
            x, j = key if isinstance(key, tuple) else _split_key(key)
            vec = tuple(_q(c) for c in vec)
            if divisor is not None and len(vec) != divisor.n_prime(str(x)):
                raise ValueError(f"zeta at ({x}, {j}) has length {len(vec)}, expected n'_x = "
                                 f"{divisor.n_prime(str(x))}")
            items.append(((str(x), int(j)), vec))
        orders = tuple((x, n) for x, n, _ in divisor.entries) if divisor else ()
        return cls(tuple(sorted(items)), orders)

    def get(self, x, j) -> tuple:
        for key, vec in self.coeffs:
            if key == (x, j):
                return vec
        raise KeyError(f"zeta_{{{x},{j}}} is not given")

    def top(self, x, j) -> Fraction:
        vec = self.get(x, j)
        if not vec:
            raise ValueError(f"zeta_{{{x},{j}}} is empty")
        return vec[0]

    def residue(self, x, j) -> Fraction:
        vec = self.get(x, j)
        n = dict(self.orders).get(x)
        if n is None or len(vec) != n or not vec:
            raise ValueError(f"the residue of zeta_{{{x},{j}}} is not fixed at this level")
        return vec[-1]

    def to_struct(self) -> list:
        return [[x, j, [str(c) for c in vec]] for (x, j), vec in self.coeffs]


def _split_key(key):
    if isinstance(key, str) and "," in key:
        x, j = key.split(",")
        return x.strip(), int(j)
    raise ValueError(f"cannot read {key!r} as a (point, flag) pair")


@dataclass(frozen=True)
class Weights:
    """Parabolic weights sigma_{x,j}."""

    values: tuple  # (((x, j), sigma), ...)

    @classmethod
    def make(cls, data: Mapping, divisor: DivisorSpec | None = None) -> "Weights":
        items = {}
        for key, v in data.items():
            x, j = key if isinstance(key, tuple) else _split_key(key)
            items[(str(x), int(j))] = _q(v)
        w = cls(tuple(sorted(items.items())))
        if divisor is not None:
            w.validate(divisor)
        return w

    def get(self, x, j) -> Fraction:
        for key, v in self.values:
            if key == (x, j):
                return v
        raise KeyError(f"sigma_{{{x},{j}}} is not given")

    def validate(self, divisor: DivisorSpec) -> None:
        by_point: dict = {}
        for (x, j), v in self.values:
            by_point.setdefault(x, []).append((j, v))
        for x, seq in by_point.items():
            if x not in divisor.support_prime:
                raise ValueError(f"weights given at {x!r}, which is not in D'")
            seq.sort()
            vals = [v for _, v in seq]
            if any(a > b for a, b in zip(vals, vals[1:])):
                raise ValueError(f"weights at {x!r} are not weakly increasing")
            if seq[0][0] == 1 and any(v > vals[0] + divisor.n_prime(x) for v in vals):
                raise ValueError(f"weights at {x!r} exceed sigma_1 + n'_x")

    def to_struct(self) -> list:
        return [[x, j, str(v)] for (x, j), v in self.values]


@dataclass(frozen=True)
class Truncation:
    z_max: int = 40
    window: int = 5
    z_budget: int = 80

    def __post_init__(self):
        if self.z_max < 1 or self.window < 1 or self.z_budget < 0:
            raise ValueError("truncation must be positive and the tail window at least 1")


@dataclass(frozen=True)
class StackQuery:
    g: int
    divisor: DivisorSpec
    gamma: GammaExponent
    d: int = 0
    eps: Fraction = Fraction(0)
    zeta: NormalForm = field(default_factory=lambda: NormalForm(()))
    sigma: Weights | None = None
    kind: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "eps", _q(self.eps))
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.g < 0:
            raise ValueError("genus must be nonnegative")
        if self.kind == "full":
            if self.eps == 0:
                raise ValueError("kind 'full' needs eps != 0")
            if not self.divisor.is_full_level:
                raise ValueError("kind 'full' needs D' = D")
        if self.kind == "semistable-full" and not self.divisor.is_full_level:
            raise ValueError("kind 'semistable-full' needs D' = D")
        if self.kind == "semistable-partial" and self.divisor.is_full_level:
            raise ValueError("kind 'semistable-partial' needs D' < D")
        if self.kind.startswith("semistable") and self.sigma is None:
            raise ValueError(f"kind {self.kind!r} needs weights sigma")
        self.gamma.check(self.points)
        if self.sigma is not None:
            self.sigma.validate(self.divisor)

    @property
    def partial(self) -> bool:
        return not self.divisor.is_full_level

    @property
    def points(self) -> tuple:
        """Points carrying flags: D' (which is D at full level)."""
        return self.divisor.support_prime

    @property
    def delta(self) -> int:
        return self.divisor.delta

    @property
    def rank(self) -> int:
        return self.gamma.r

    @property
    def chi(self) -> int:
        return chi(self.gamma, self.divisor, "partial" if self.partial else "full", self.g)

    @property
    def star_zeta(self) -> Fraction:
        return star(self.gamma, self.zeta)

    @property
    def star_sigma(self) -> Fraction:
        return star(self.gamma, self.sigma)

    @property
    def tau(self) -> Fraction:
        if self.gamma.r == 0:
            raise ValueError("tau is undefined at rank 0")
        return (self.d + self.star_sigma) / self.gamma.r

    def to_struct(self) -> dict:
        return {
            "g": self.g,
            "divisor": self.divisor.to_struct(),
            "gamma": self.gamma.to_struct(),
            "d": self.d,
            "eps": str(self.eps),
            "zeta": self.zeta.to_struct(),
            "sigma": self.sigma.to_struct() if self.sigma is not None else None,
            "kind": self.kind,
        }

    @classmethod
    def from_struct(cls, data: Mapping) -> "StackQuery":
        divisor = DivisorSpec.make([tuple(e) if not isinstance(e, str) else e for e in data["divisor"]])
        gamma = GammaExponent.from_struct(data["gamma"])
        zeta = NormalForm.make({(x, j): vec for x, j, vec in data.get("zeta", [])}, divisor)
        sigma = data.get("sigma")
        sigma = Weights.make({(x, j): v for x, j, v in sigma}, divisor) if sigma is not None else None
        return cls(int(data["g"]), divisor, gamma, int(data.get("d", 0)), Fraction(str(data.get("eps", 0))),
                   zeta, sigma, data.get("kind", "full"))


# ----------------------------------------------------------------------
# class arithmetic


def class_predicates(gamma: GammaExponent, divisor: DivisorSpec, zeta: NormalForm) -> dict:
    """Fullness, non-resonance and admissibility of gamma at the points of D'."""
    full_at, nonres_at = set(), set()
    admissible = True
    for x in divisor.support_prime:
        flags = gamma.at(x)
        is_full = all(m in (0, 1) for m in flags.values())
        if is_full:
            full_at.add(x)
        used = sorted(j for j, m in flags.items() if m)
        relevant = divisor.n_prime(x) >= 2
        if relevant:
            tops = [zeta.top(x, j) for j in used]  # KeyError on missing entries
        else:
            try:
                tops = [zeta.top(x, j) for j in used]
            except (KeyError, ValueError):
                tops = None
        if tops is not None and len(set(tops)) == len(tops):
            nonres_at.add(x)
        if relevant and not (is_full and x in nonres_at):
            admissible = False
    return {"full_at": full_at, "nonresonant_at": nonres_at, "admissible": admissible}


def star(gamma: GammaExponent, data) -> Fraction:
    """gamma * zeta (with residues) or gamma * sigma."""
    total = Fraction(0)
    for (x, j), m in gamma.parts:
        if isinstance(data, NormalForm):
            total += m * data.residue(x, j)
        elif isinstance(data, Weights):
            total += m * data.get(x, j)
        elif data is None:
            raise ValueError("no weights given")
        else:
            total += m * _q(data[(x, j)])
    return total


def chi(gamma: GammaExponent, divisor: DivisorSpec, mode: str = "full", g: int = 0) -> int:
    r = gamma.r
    if mode == "full":
        delta = divisor.degree - len(divisor.support)
        out = (2 * g - 2) * r * r - delta * r
        mult = {x: n for x, n, _ in divisor.entries}
    elif mode == "partial":
        out = (2 * g - 2 + divisor.degree - divisor.degree_prime) * r * r
        out += r * sum(1 - np_ for _, _, np_ in divisor.entries if np_ > 0)
        mult = {x: np_ for x, _, np_ in divisor.entries if np_ > 0}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for x, n in mult.items():
        flags = [m for _, m in sorted(gamma.at(x).items())]
        out += 2 * n * sum(flags[i] * flags[k] for i in range(len(flags)) for k in range(i + 1, len(flags)))
    return out


def _cross(gamma1: GammaExponent, gamma2: GammaExponent, x) -> int:
    """sum_{i<j} r1_{x,i} r2_{x,j} over flag labels."""
    a, b = gamma1.at(x), gamma2.at(x)
    return sum(m1 * m2 for i, m1 in a.items() for j, m2 in b.items() if i < j)


def euler_pairing(gamma1: GammaExponent, d1: int, gamma2: GammaExponent, d2: int,
                  divisor: DivisorSpec, g: int) -> int:
    """Euler characteristic of the sheaf of parabolic homomorphisms."""
    r1, r2 = gamma1.r, gamma2.r
    out = (1 - g) * r1 * r2 + r1 * d2 - r2 * d1
    for x, _, np_ in divisor.entries:
        if np_:
            out -= np_ * _cross(gamma1, gamma2, x)
    return out


def twist(gamma: GammaExponent, d: int, divisor: DivisorSpec) -> tuple:
    """Class of E(D' - D): same flags, degree shifted by r deg(D' - D)."""
    return gamma, d + gamma.r * (divisor.degree_prime - divisor.degree)


# ----------------------------------------------------------------------
# drivers


def _query_grading(query: StackQuery) -> tuple:
    """Grading over the flags actually used by gamma, and gamma's vector."""
    pts = query.points
    flags = [tuple(sorted(j for j, m in query.gamma.at(x).items() if m)) for x in pts]
    grading = Grading(pts, flags)
    return grading, grading.vector(query.gamma)


def _sub_vectors(grading: Grading, cap: tuple) -> list:
    out = []
    for m in range(1, cap[0] + 1):
        out.extend(v for v in _vectors_of_rank(grading, m) if all(a <= b for a, b in zip(v, cap)))
    return out


def _signed_qh(ring, k: int) -> ScalarFraction:
    return ring.mono({"qh": k}, -1 if k % 2 else 1)


_kernel_source = dt_kernels


def set_kernel_source(fn) -> None:
    """Route universal kernel construction through fn(params), e.g. a disk cache."""
    global _kernel_source
    _kernel_source = fn or dt_kernels
    _kernel_at_one.cache_clear()


@lru_cache(maxsize=64)
def _kernel_at_one(g: int, npoints: int, delta: int, r_max: int, z_max: int, window: int,
                   target: str = "univ") -> dict:
    """z = 1 values of the kernel keyed by (r, per-point sorted multiplicities).

    target "univ" uses H^univ; "E" and "P" use the kernels built from the
    specialized generating functions.
    """
    p = GenFunParams(g, tuple(f"p{i}" for i in range(npoints)), delta, r_max, z_max)
    if target == "univ":
        hu = _kernel_source(p)["H_univ"]
    else:
        from .specialize import specialized_kernel
        hu = specialized_kernel(p, target)
    vals = eval_z_one(hu, window)
    out = {}
    for vec, v in vals.items():
        out.setdefault(_multiset_key(p.grading, vec), v)
    return out


def _multiset_key(grading: Grading, vec: tuple) -> tuple:
    return (vec[0],) + tuple(tuple(sorted((m for m in vec[lo:hi] if m), reverse=True))
                             for lo, hi in grading.point_slices())


def _residue_filter(query: StackQuery):
    eps = query.eps
    if eps == 0:
        return lambda gam: star(gam, query.zeta) == 0
    return lambda gam: (star(gam, query.zeta) / eps).denominator == 1


def _sigma_filter(query: StackQuery):
    tau = query.tau
    return lambda gam: (star(gam, query.sigma) - tau * gam.r).denominator == 1


def _degree_vanishes(query: StackQuery) -> bool:
    """True when eps d + gamma * zeta != 0 forces the class to be zero."""
    if query.kind in ("full", "semistable-full"):
        return query.eps * query.d + query.star_zeta != 0
    return False


def _check_admissible(query: StackQuery) -> None:
    if not class_predicates(query.gamma, query.divisor, query.zeta)["admissible"]:
        raise InadmissibleClassError(f"gamma = {query.gamma.to_struct()} lies outside Gamma_{{D',zeta}}")


def conn_class(query: StackQuery, trunc: Truncation = Truncation()) -> ScalarFraction:
    """Motivic class of the stack described by the query, read off at z = 1."""
    return _conn_driver(query, trunc, "univ")


def _lefschetz(ring, target: str) -> tuple:
    """Images of (L, -L^(1/2))."""
    if target == "univ":
        return ring.var("qh", 2), ring.mono({"qh": 1}, -1)
    if target == "E":
        return ring.mono({"uh": 2, "vh": 2}), ring.mono({"uh": 1, "vh": 1}, -1)
    if target == "P":
        return ring.var("t", 2), ring.mono({"t": 1}, -1)
    raise ValueError(f"unknown target {target!r}")


def _conn_driver(query: StackQuery, trunc: Truncation, target: str) -> ScalarFraction:
    ring = get_ring(query.g)
    if query.kind == "nonpositive-graded":
        raise ValueError("nonpositive classes are z-graded; use graded_class")
    if query.gamma.r == 0:
        return ring.one()
    _check_admissible(query)
    if _degree_vanishes(query):
        return ring.zero()
    grading, cap = _query_grading(query)
    kernel = _kernel_at_one(query.g, len(query.points), query.delta, max(query.rank, 1),
                            trunc.z_max, trunc.window, target)
    preds = []
    if query.kind in ("full", "semistable-full"):
        preds.append(_residue_filter(query))
    if query.kind.startswith("semistable"):
        preds.append(_sigma_filter(query))
    lef, root = _lefschetz(ring, target)
    scale = lef if query.kind != "semistable-partial" else ring.one()
    A = GradedSeries(ring, grading, query.rank, 0, cap=cap)
    for vec in _sub_vectors(grading, cap):
        gam = grading.gamma(vec)
        if not all(p(gam) for p in preds):
            continue
        v = kernel.get(_multiset_key(grading, vec))
        if v is not None and not v.is_zero():
            A.data[vec] = v * scale
    E = pleth_exp(A)
    return coefficient(E, cap, 0) * root ** query.chi


def _graded_setup(query: StackQuery, N: int):
    if query.kind == "nonpositive-graded":
        N = 0
    Z = -query.d + N * query.rank
    return N, Z


def graded_class(query: StackQuery, N: int, trunc: Truncation = Truncation(), _logs=None) -> ScalarFraction:
    """Class of the stack from the z-graded formula with twist N."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    ring = get_ring(query.g)
    if query.gamma.r == 0:
        return ring.one() if query.d == 0 else ring.zero()
    _check_admissible(query)
    if _degree_vanishes(query):
        return ring.zero()
    N, Z = _graded_setup(query, N)
    if Z < 0:
        return ring.zero()
    if Z > trunc.z_budget:
        raise TruncationError(f"z-degree {Z} exceeds the budget {trunc.z_budget}")
    grading, cap = _query_grading(query)
    logs = _logs if _logs is not None else _sch_log(query, grading, cap, Z)
    sign = _signed_qh(ring, query.chi)
    if query.kind == "nonpositive-graded" and query.partial:
        omega = _sch_series(query, grading, cap, Z)
        return coefficient(omega, cap, Z) * sign
    eps = query.eps
    zeta_ok = lambda gam, j: -eps * j + star(gam, query.zeta) == -eps * N * gam.r
    if query.kind in ("semistable-full", "semistable-partial"):
        tau = query.tau
        # the twist moves the slope down by N
        sigma_ok = lambda gam, j: -j + star(gam, query.sigma) == (tau - N) * gam.r
    if query.kind == "full":
        pred = zeta_ok
    elif query.kind == "semistable-full":
        pred = lambda gam, j: zeta_ok(gam, j) and sigma_ok(gam, j)
    elif query.kind == "semistable-partial":
        pred = sigma_ok
    else:
        pred = zeta_ok
    L = logs.truncate(z_max=Z) if logs.z_max != Z else logs
    if query.kind != "semistable-partial":
        L = L.scale(ring.var("qh", 2))
    E = pleth_exp(filter_terms(L, pred))
    return coefficient(E, cap, Z) * sign


def _sch_params(query: StackQuery, Z: int) -> GenFunParams:
    return GenFunParams(query.g, query.points, query.delta, query.rank, Z)


def _sch_series(query, grading, cap, Z) -> GradedSeries:
    return omega_sch(_sch_params(query, Z), cap=cap, grading=grading)


def _sch_log(query, grading, cap, Z) -> GradedSeries:
    return pleth_log(_sch_series(query, grading, cap, Z))


def stabilization_bound(query: StackQuery) -> int:
    """A twist N from which the graded formula is expected to be constant."""
    g, div, r = query.g, query.divisor, max(query.gamma.r, 1)
    l0 = max(2 * g - 2 + div.degree, 0)
    bounds = []
    if query.kind in ("full", "semistable-full") and query.eps != 0:
        norm = Fraction(0)
        for x in query.points:
            res = [abs(query.zeta.residue(x, j)) for j, m in query.gamma.at(x).items() if m]
            norm += max(res, default=Fraction(0))
        bounds.append(math.ceil(norm / abs(query.eps) + Fraction((r - 1) * l0, 2)))
    if query.kind.startswith("semistable"):
        s = Fraction(0)
        for x in query.points:
            vals = [abs(query.sigma.get(x, j)) for j, m in query.gamma.at(x).items() if m]
            s += max(vals, default=Fraction(0))
        l = max(2 * g - 2 + div.degree, 2 * s)
        bounds.append(math.floor(Fraction(query.d, r) + Fraction(r - 1, 2) * l + 2 * s) + 1)
    if query.kind == "nonpositive-graded":
        bounds.append(0)
    if not bounds:
        raise ValueError("no stabilization bound for this query")
    return max(max(bounds), 0) + SAFETY_MARGIN


def stabilized_graded_class(query: StackQuery, trunc: Truncation = Truncation(), max_steps: int = 6) -> tuple:
    """(value, witness N): the first N >= bound with graded(N) == graded(N + 1)."""
    N = stabilization_bound(query)
    if query.gamma.r == 0 or query.kind == "nonpositive-graded":
        return graded_class(query, N, trunc), N
    grading, cap = _query_grading(query)
    top = -query.d + (N + max_steps + 1) * query.rank
    if top > trunc.z_budget:
        raise TruncationError(f"z-degree {top} exceeds the budget {trunc.z_budget}")
    logs = _sch_log(query, grading, cap, max(top, 0))
    prev = graded_class(query, N, trunc, _logs=logs)
    for step in range(max_steps):
        cur = graded_class(query, N + 1, trunc, _logs=logs)
        if cur == prev:
            return prev, N
        N, prev = N + 1, cur
    raise TruncationError(f"graded class did not stabilize by N = {N}")


def nilpotent_pair_class(g: int, delta: int, mu, points=(), z_max: int = 40, r_max: int | None = None,
                         cap=None) -> GradedSeries:
    """Generating series of nilpotent pairs of generic Jordan type mu.

    The coefficient at w^gamma z^(-d) is the class of the pairs of class
    (gamma, d); summed over mu with weights (-qh)^(r^2 delta) this gives
    Omega^Sch.
    """
    mu = Partition(mu)
    r_max = max(mu.size, 1) if r_max is None else r_max
    if mu.size > r_max:
        raise TruncationError(f"|mu| = {mu.size} exceeds r_max = {r_max}")
    p = GenFunParams(g, tuple(points), delta, r_max, z_max)
    term = omega_sch_term(p, mu, cap=cap)
    r = mu.size
    if r == 0 or delta == 0:
        return term
    return term.scale(_signed_qh(p.ring, -r * r * delta))


# ----------------------------------------------------------------------
# the one-point example with full flags


def ddp_dimension(mu, n: int, g: int) -> int:
    mu = list(mu)
    m = sum(mu)
    cross = sum(mu[i] * mu[j] for i in range(len(mu)) for j in range(i + 1, len(mu)))
    return 2 * m * m * (g - 1) + 2 * n * cross + 2


_PRIMES = (101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179)


def _generic_sigma(r: int, attempt: int) -> list:
    ps = _PRIMES[attempt * r:(attempt + 1) * r]
    if len(ps) < r:
        raise ValueError("not enough primes for the requested rank")
    return [Fraction(j, ps[j - 1]) for j in range(1, r + 1)]


def _is_generic(sigma: list, d: int) -> bool:
    r = len(sigma)
    tau = (d + sum(sigma)) / r
    for mask in range(1, (1 << r) - 1):
        s = [sigma[i] for i in range(r) if mask >> i & 1]
        if (len(s) * tau - sum(s)).denominator == 1:
            return False
    return True


def ddp_query(g: int, n: int, r: int, attempt: int = 0, d: int = 0) -> StackQuery:
    """Semistable class (r, 1^r) at one point of multiplicity n, eps = 0."""
    divisor = DivisorSpec.make({"p": n})
    gamma = GammaExponent.make(r, {("p", j): 1 for j in range(1, r + 1)})
    if n >= 2:
        zeta = {("p", j): [j] + [0] * (n - 1) for j in range(1, r + 1)}
    else:
        zeta = {("p", j): [0] for j in range(1, r + 1)}
    sigma = _generic_sigma(r, attempt)
    if not _is_generic(sigma, d):
        raise ValueError("weights are not generic")
    return StackQuery(g, divisor, gamma, d, Fraction(0), NormalForm.make(zeta, divisor),
                      Weights.make({("p", j): s for j, s in enumerate(sigma, 1)}, divisor), "semistable-full")


def ddp_poincare(g: int, n: int, r: int, trunc: Truncation = Truncation()) -> dict:
    """Poincare polynomial of the coarse space and the duality check."""
    from .specialize import P_TARGET, specialize_value

    query = None
    for attempt in range(3):
        try:
            query = ddp_query(g, n, r, attempt)
            break
        except ValueError:
            log.info("weights attempt %d not generic, regenerating", attempt)
    if query is None:
        raise ValueError("could not find generic weights in 3 attempts")
    value = specialize_value(conn_class(query, trunc), P_TARGET)
    ring = value.ring
    t = ring.var("t")
    H = value * (t * t - 1)
    d_val = ddp_dimension([1] * r, n, g)
    flipped = H.substitute({"t": ring.var("t", -1)}) * ring.var("t", 2 * d_val)
    return {"H": H, "d_val": d_val, "palindromic": flipped == H, "sigma": query.sigma.to_struct()}
