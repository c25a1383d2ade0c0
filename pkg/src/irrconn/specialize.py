"""E-polynomial and virtual Poincare specializations.

E sends q^(1/2) to u^(1/2) v^(1/2) and every alpha_i to u; P then puts
u = v = t.  In generators: E is qh -> uh*vh, a_i -> uh^2 and P is
qh -> t, a_i -> t.  Both are ring maps commuting with the Adams operations,
so they can be applied before or after Exp/Log.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import ScalarFraction, get_ring, substitute
from .genfun import FactoredTerm, GenFunParams, _build, _mono, _one_minus_z, omega_univ
from .partition import Partition
from .series import GradedSeries, pleth_log

__all__ = [
    "SpecializationTarget",
    "E_TARGET",
    "P_TARGET",
    "ParityError",
    "specialize_value",
    "omega_specialized",
    "specialized_kernel",
    "e_p_conn",
]


class ParityError(ValueError):
    """A half-integral power of u, v or t survived where it should not."""


@dataclass(frozen=True)
class SpecializationTarget:
    kind: str

    def __post_init__(self):
        if self.kind not in ("E", "P"):
            raise ValueError(f"unknown specialization {self.kind!r}")

    def assignment(self, ring) -> dict:
        if self.kind == "E":
            out = {"qh": ring.mono({"uh": 1, "vh": 1})}
            out.update({a: ring.var("uh", 2) for a in ring.alpha_names()})
        else:
            out = {"qh": ring.var("t")}
            out.update({a: ring.var("t") for a in ring.alpha_names()})
        return out


E_TARGET = SpecializationTarget("E")
P_TARGET = SpecializationTarget("P")


def _target(target) -> SpecializationTarget:
    return target if isinstance(target, SpecializationTarget) else SpecializationTarget(str(target))


def _check_even(f: ScalarFraction, names=("uh", "vh")) -> None:
    ring = f.ring
    idx = [ring.index(n) for n in names]
    for part in (f.numerator(), f.denominator()):
        for e, _ in part.terms():
            if any(e[i] % 2 for i in idx):
                raise ParityError(f"half-integral power of u or v in {f.to_text()}")


def specialize_value(x, target, integral: bool = False):
    """Image of a fraction or a series under E or P.

    With integral=True the E-image must only involve whole powers of u and v
    (this is asserted for stack classes).
    """
    target = _target(target)
    if isinstance(x, GradedSeries):
        return x.map_coefficients(lambda c: specialize_value(c, target, integral))
    ring = x.ring
    if target.kind == "P":
        for name in ("uh", "vh"):
            lo, hi = x.degree_range(name)
            if lo or hi:
                raise ValueError("P is applied to universal values, not to E-images")
        if integral:
            _check_even(substitute(x, E_TARGET.assignment(ring)))
    out = substitute(x, target.assignment(ring))
    if integral and target.kind == "E":
        _check_even(out)
    return out


def _e_term(mu, g: int, delta: int) -> FactoredTerm:
    ring = get_ring(g)
    mu = Partition(mu)
    t = FactoredTerm(ring).mul(_mono(ring, uh=delta * mu.size, vh=delta * mu.size))
    for a, l in mu.arms_legs():
        sign = -1 if delta % 2 else 1
        t = t.mul(_mono(ring, sign, uh=2 * delta * l, vh=2 * delta * l, z=2 * delta * a))
        for _ in range(g):
            t = t.mul_factor(_mono(ring, uh=2 * l, vh=2 * l + 2), _mono(ring, z=2 * a + 1))
            t = t.mul_factor(_mono(ring, uh=2 * l + 2, vh=2 * l), _mono(ring, z=2 * a + 1))
        t = t.div_factor(_mono(ring, uh=2 * l + 2, vh=2 * l + 2), _mono(ring, z=2 * a))
        t = t.div_factor(_mono(ring, uh=2 * l, vh=2 * l), _mono(ring, z=2 * a + 2))
    return t


def _p_term(mu, g: int, delta: int) -> FactoredTerm:
    ring = get_ring(g)
    mu = Partition(mu)
    t = FactoredTerm(ring).mul(_mono(ring, t=delta * mu.size))
    for a, l in mu.arms_legs():
        sign = -1 if delta % 2 else 1
        t = t.mul(_mono(ring, sign, t=2 * l * delta, z=2 * a * delta))
        for _ in range(2 * g):
            t = t.mul_factor(_mono(ring, t=2 * l + 1), _mono(ring, z=2 * a + 1))
        t = t.div_factor(_mono(ring, t=2 * l + 2), _mono(ring, z=2 * a))
        t = t.div_factor(_mono(ring, t=2 * l), _mono(ring, z=2 * a + 2))
    return t


def omega_specialized(p: GenFunParams, target, cap=None, grading=None, check: bool = False) -> GradedSeries:
    """Omega^E or Omega^P built from the closed product formula.

    With check=True the result is compared with the image of Omega^univ.
    """
    target = _target(target)
    if target.kind == "E":
        out = _build(p, _e_term, 2, cap, grading, qvar={"uh": 2, "vh": 2})
    else:
        out = _build(p, _p_term, 2, cap, grading, qvar={"t": 2})
    if check:
        other = specialize_value(omega_univ(p, cap, grading), target)
        if other != out:
            raise AssertionError(f"closed form of Omega^{target.kind} disagrees with the substitution route")
    return out


def specialized_kernel(p: GenFunParams, target) -> GradedSeries:
    """(1 - z^2) Log Omega^E (or Omega^P)."""
    return pleth_log(omega_specialized(p, target)).scale(_one_minus_z(p.ring, 2))


def e_p_conn(query, target, trunc=None, route: str = "substitution") -> ScalarFraction:
    """E-polynomial or virtual Poincare polynomial of a stack class.

    route "substitution" specializes the universal class; route "kernel"
    runs the driver on the specialized kernel directly.
    """
    from .moduli import Truncation, _conn_driver, conn_class

    target = _target(target)
    trunc = trunc or Truncation()
    if route == "substitution":
        return specialize_value(conn_class(query, trunc), target, integral=True)
    if route == "kernel":
        return _conn_driver(query, trunc, target.kind)
    raise ValueError(f"unknown route {route!r}")
