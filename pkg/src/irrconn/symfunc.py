"""Modified Macdonald polynomials in the monomial basis.

H~_mu(w; z, q) is built from the combinatorial formula of Haglund, Haiman and
Loehr: a sum over fillings of the (French) diagram of mu, weighted by
z^inv * q^maj.  Only the coefficient of x^lambda for each partition lambda
is needed, so fillings are enumerated one content vector at a time.

In our argument order the statistic inv goes with z and maj goes with q, so
that nabla acts by (-1)^|mu| q^n(mu) z^n(mu') and H~_(2) = m_2 + (1+z) m_11.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from math import factorial, prod

from .partition import Partition, partitions_of

__all__ = [
    "ResourceLimitError",
    "SymFunc",
    "hhl_modified_macdonald",
    "m_coefficient",
    "MAX_SIZE",
]

MAX_SIZE = 8


class ResourceLimitError(RuntimeError):
    """Requested size is above the configured enumeration bound."""


class SymFunc:
    """sum_lambda c_lambda(first, second) m_lambda, with c_lambda stored as
    {(i, j): integer} meaning sum c * first^i * second^j."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for lam, coeff in (terms or {}).items():
            coeff = {k: v for k, v in coeff.items() if v}
            if coeff:
                self.terms[Partition(lam)] = coeff

    def __eq__(self, other):
        return isinstance(other, SymFunc) and self.terms == other.terms

    def __repr__(self):
        parts = []
        for lam in sorted(self.terms, reverse=True):
            parts.append(f"{_bivar_text(self.terms[lam])}*m{list(lam)}")
        return "SymFunc(" + (" + ".join(parts) or "0") + ")"

    def coefficient(self, kappa) -> dict:
        lam = Partition(sorted((k for k in kappa if k), reverse=True))
        return dict(self.terms.get(lam, {}))

    def swap(self) -> "SymFunc":
        """Exchange the two parameters."""
        return SymFunc({lam: {(j, i): v for (i, j), v in c.items()} for lam, c in self.terms.items()})

    def at_one(self) -> dict:
        """Set both parameters to 1."""
        return {lam: sum(c.values()) for lam, c in self.terms.items()}

    def to_struct(self) -> list:
        return [[list(lam), sorted([[i, j, v] for (i, j), v in c.items()])]
                for lam, c in sorted(self.terms.items(), reverse=True)]


def _bivar_text(c: dict) -> str:
    out = []
    for (i, j), v in sorted(c.items()):
        mono = "*".join(s for s in (f"X^{i}" if i else "", f"Y^{j}" if j else "") if s)
        out.append(f"{v}*{mono}" if mono else str(v))
    return "(" + " + ".join(out) + ")"


def _multiset_perms(counts: list, n: int):
    """All words with counts[k] letters equal to k."""
    word = [0] * n

    def rec(pos):
        if pos == n:
            yield tuple(word)
            return
        for k, c in enumerate(counts):
            if c:
                counts[k] -= 1
                word[pos] = k
                yield from rec(pos + 1)
                counts[k] += 1

    yield from rec(0)


def _diagram(mu: Partition):
    """Cells of the French diagram with the data the statistics need.

    Rows are numbered from 0 at the bottom; row r has length mu[r].
    Returns the cell list in reading order (top row first, left to right),
    and for each cell its index below (or None), arm, leg.
    """
    conj = mu.conjugate()
    cells = [(r, c) for r in range(len(mu) - 1, -1, -1) for c in range(mu[r])]
    index = {cell: k for k, cell in enumerate(cells)}
    below = [index.get((r - 1, c)) for r, c in cells]
    arm = [mu[r] - c - 1 for r, c in cells]
    leg = [conj[c] - r - 1 for r, c in cells]
    # attacking pairs (a, b) with a before b in reading order
    attacks = []
    for a, (ra, ca) in enumerate(cells):
        for b, (rb, cb) in enumerate(cells):
            if b <= a:
                continue
            same_row = ra == rb
            # upper cell a, lower cell b one row down and strictly to the left
            diag = ra == rb + 1 and ca > cb
            if same_row or diag:
                attacks.append((a, b))
    return cells, below, arm, leg, attacks


@lru_cache(maxsize=None)
def _hhl(parts: tuple) -> SymFunc:
    mu = Partition(parts)
    n = mu.size
    if n == 0:
        return SymFunc({(): {(0, 0): 1}})
    cells, below, arm, leg, attacks = _diagram(mu)
    terms = {}
    for lam in partitions_of(n):
        acc = defaultdict(int)
        for word in _multiset_perms(list(lam), n):
            inv = 0
            for a, b in attacks:
                if word[a] > word[b]:
                    inv += 1
            maj = 0
            for k, bl in enumerate(below):
                if bl is not None and word[k] > word[bl]:
                    maj += leg[k] + 1
                    inv -= arm[k]
            acc[(inv, maj)] += 1
        terms[lam] = dict(acc)
    return SymFunc(terms)


def hhl_modified_macdonald(mu, max_size: int = MAX_SIZE) -> SymFunc:
    """H~_mu(w; z, q) in the m-basis; first parameter z, second q."""
    mu = Partition(mu)
    if mu.size > max_size:
        raise ResourceLimitError(f"|mu| = {mu.size} exceeds the bound {max_size}")
    return _hhl(tuple(mu))


def m_coefficient(f: SymFunc, kappa) -> dict:
    """Coefficient of the monomial w^kappa, as {(i, j): integer}."""
    return f.coefficient(kappa)


def multinomial(lam) -> int:
    return factorial(sum(lam)) // prod(factorial(k) for k in lam)
