"""Acceptance checks.  Every comparison is exact."""

import random
import subprocess
import sys
from fractions import Fraction

import pytest

from irrconn.cli import euler_identity
from irrconn.exactalg import ScalarFraction, get_ring
from irrconn.genfun import (
    GenFunParams,
    check_admissible,
    check_mellit,
    dt_kernels,
    l_univ,
    omega_sch,
    substitution_identity,
)
from irrconn.moduli import (
    DivisorSpec,
    NormalForm,
    StackQuery,
    Truncation,
    chi,
    conn_class,
    ddp_dimension,
    ddp_poincare,
    euler_pairing,
    stabilization_bound,
    stabilized_graded_class,
    twist,
)
from irrconn.partition import enumerate_partitions, partitions_of
from irrconn.series import GammaExponent, GradedSeries, Grading, adams, pleth_exp, pleth_log, tail_ok
from irrconn.specialize import specialize_value
from irrconn.symfunc import hhl_modified_macdonald, multinomial

Z_MAX, WINDOW = 40, 5
RUNS = [(1, 0, 0, 2), (1, 1, 1, 2), (1, 2, 1, 2), (2, 0, 0, 2), (2, 1, 1, 2), (1, 1, 1, 3)]


def params(g, delta, npts, r_max):
    return GenFunParams(g, tuple(f"p{i}" for i in range(1, npts + 1)), delta, r_max, Z_MAX)


_KERNELS = {}


def kernels(run):
    if run not in _KERNELS:
        _KERNELS[run] = dt_kernels(params(*run))
    return _KERNELS[run]


def run_id(run):
    return "g{}-delta{}-pts{}-r{}".format(*run)


def rank_one_query(g, n):
    div = DivisorSpec.make({"p": n})
    return StackQuery(g, div, GammaExponent.make(1, {("p", 1): 1}), 0, Fraction(1),
                      NormalForm.make({("p", 1): [0] * n}, div))


def rank_one_value(g):
    R = get_ring(g)
    q = R.var("qh", 2)
    return q ** g * ScalarFraction.from_laurent(l_univ(R)).substitute({"z": 1}) / (q - 1)


# 1 ---------------------------------------------------------------------


@pytest.mark.parametrize("run", RUNS, ids=run_id)
def test_criterion_01_mellit_identity(run):
    report = check_mellit(params(*run), WINDOW, kernels=kernels(run))
    assert report["gammas"]
    assert report["status"] == "equal"
    assert all(row["status"] == "equal" for row in report["gammas"])


# 2 ---------------------------------------------------------------------


@pytest.mark.parametrize("run", RUNS, ids=run_id)
def test_criterion_02_polynomiality_certificates(run):
    for name, H in kernels(run).items():
        for vec in H.gammas():
            if vec[0] == 0:
                continue
            assert tail_ok(H, vec, WINDOW), (name, vec)


# 3 ---------------------------------------------------------------------


@pytest.mark.parametrize("g,delta,points", [(1, 0, ()), (1, 0, ("p",)), (1, 1, ("p",))])
def test_criterion_03_admissibility(g, delta, points):
    assert check_admissible(GenFunParams(g, points, delta, 3, 20)) == []


# 4 ---------------------------------------------------------------------


@pytest.mark.parametrize("g", [1, 2])
@pytest.mark.parametrize("delta", [0, 1, 2])
def test_criterion_04_substitution_identity(g, delta):
    for m in range(4):
        for mu in partitions_of(m):
            lhs, rhs = substitution_identity(mu, g, delta)
            assert lhs == rhs, mu


# 5 ---------------------------------------------------------------------


@pytest.mark.parametrize("run", RUNS[:5], ids=run_id)
def test_criterion_05_stabilization(run):
    p = params(*run)
    log_sch = pleth_log(omega_sch(p))
    hu = kernels(run)["H_univ"]
    checked = 0
    for vec in log_sch.gammas():
        if not 1 <= vec[0] <= 2:
            continue
        zc = log_sch.zcoeffs(vec)
        window = [zc.get(d, p.ring.zero()) for d in range(Z_MAX - WINDOW, Z_MAX + 1)]
        assert all(c == window[0] for c in window), vec
        assert window[0] == hu.data[vec].substitute({"z": 1}), vec
        checked += 1
    assert checked


# 6 ---------------------------------------------------------------------


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_criterion_06_rank_one_class(g, n):
    assert conn_class(rank_one_query(g, n)) == rank_one_value(g)


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_criterion_06_rank_one_poincare(g, n):
    value = specialize_value(conn_class(rank_one_query(g, n)), "P")
    t = get_ring(g).var("t")
    assert value == t ** (2 * g) * (1 + t) ** (2 * g) / (t * t - 1)


# 7 ---------------------------------------------------------------------


def graded_queries():
    out = []
    for g in (1, 2):
        for n in (1, 2):
            div = DivisorSpec.make({"p": n})
            zero = ["0"] * n
            out.append(StackQuery(g, div, GammaExponent.make(1, {("p", 1): 1}), 0, Fraction(1),
                                  NormalForm.make({("p", 1): zero}, div)))
            out.append(StackQuery(g, div, GammaExponent.make(1, {("p", 1): 1}), 2, Fraction(1, 2),
                                  NormalForm.make({("p", 1): ["1"] + ["-1"] * (n - 1) if n > 1 else ["-1"]}, div)))
            top = ["1"] + ["1/3"] * (n - 1) if n > 1 else ["1/3"]
            bot = ["2"] + ["-1/3"] * (n - 1) if n > 1 else ["-1/3"]
            for d in (0, 1):
                zeta = {("p", 1): top, ("p", 2): bot}
                if n == 1:
                    zeta = {("p", 1): [Fraction(1, 3) + Fraction(d, 2)], ("p", 2): ["-1/3"]}
                out.append(StackQuery(g, div, GammaExponent.make(2, {("p", 1): 1, ("p", 2): 1}), d,
                                      Fraction(1), NormalForm.make(zeta, div)))
    div = DivisorSpec.make({"p": 1})
    out.append(StackQuery(1, div, GammaExponent.make(2, {("p", 1): 2}), 2, Fraction(1),
                          NormalForm.make({("p", 1): [-1]}, div)))
    return out


@pytest.mark.parametrize("query", graded_queries(), ids=lambda q: f"g{q.g}-r{q.gamma.r}-d{q.d}-deg{q.divisor.degree}")
def test_criterion_07_graded_matches_conn_class(query):
    value, witness = stabilized_graded_class(query, Truncation())
    assert value == conn_class(query)
    assert witness <= stabilization_bound(query) + 2


# 8 ---------------------------------------------------------------------


def test_criterion_08_dimension_formula():
    assert ddp_dimension([1, 1], 2, 1) == 6


@pytest.mark.parametrize("r,n,g", [(1, 2, 1), (2, 2, 1), (2, 3, 1)])
def test_criterion_08_duality(r, n, g):
    H = ddp_poincare(g, n, r)["H"]
    ring = H.ring
    d = ddp_dimension([1] * r, n, g)
    assert H.substitute({"t": ring.var("t", -1)}) * ring.var("t", 2 * d) == H


# 9 ---------------------------------------------------------------------


def random_series(rng, ring, grading, r_max, z_max):
    terms = {}
    nflags = len(grading.flags[0]) if grading.points else 0
    for _ in range(5):
        r = rng.randint(1, r_max)
        if nflags:
            a = rng.randint(0, r)
            vec = (r, a, r - a)
        else:
            vec = (r,)
        num = ring.mono({"qh": rng.randint(-2, 2), "a1": rng.randint(-1, 1)}, rng.randint(-3, 3))
        terms[(vec, rng.randint(0, z_max))] = num / (1 - ring.var("qh", 2 * rng.randint(1, 2)))
    return GradedSeries.from_terms(ring, grading, r_max, z_max, terms)


def random_class(rng, divisor, nflags=3):
    r = rng.randint(1, 3)
    parts = {}
    for x in divisor.support_prime:
        for _ in range(r):
            j = rng.randint(1, nflags)
            parts[(x, j)] = parts.get((x, j), 0) + 1
    return GammaExponent.make(r, parts), rng.randint(-3, 3)


def random_divisor(rng):
    entries = []
    for x in ("p", "q")[:rng.randint(1, 2)]:
        n = rng.randint(1, 3)
        entries.append(f"{x}:{n}:{rng.randint(0, n)}")
    return DivisorSpec.make(entries)


def test_criterion_09_lambda_ring_and_macdonald():
    rng = random.Random(9)
    R = get_ring(1)
    plain = Grading()
    A = random_series(rng, R, plain, 36, 36)
    for n in range(1, 7):
        for m in range(1, 7):
            assert adams(adams(A, n), m) == adams(A, n * m)
    onept = Grading(("p",), nflags=2)
    for _ in range(4):
        A, B = random_series(rng, R, onept, 3, 4), random_series(rng, R, onept, 3, 4)
        assert pleth_log(pleth_exp(A)) == A
        assert pleth_exp(A + B) == pleth_exp(A) * pleth_exp(B)
    for m in range(7):
        for mu in partitions_of(m):
            h = hhl_modified_macdonald(mu)
            assert h.swap() == hhl_modified_macdonald(mu.conjugate())
            assert h.at_one() == {lam: multinomial(lam) for lam in partitions_of(m)}
    for mu in enumerate_partitions(8):
        assert sum(2 * l + 1 for _, l in mu.arms_legs()) == mu.pairing(mu)


def euler_pairs(count=1000):
    rng = random.Random(1000)
    for _ in range(count):
        g = rng.randint(0, 3)
        div = random_divisor(rng)
        yield g, div, random_class(rng, div), random_class(rng, div)


def test_criterion_09_euler_characteristic_identity():
    # as stated: the right side is (chi1 + chi2 - chi12) / 2
    for g, div, (a, d1), (b, d2) in euler_pairs():
        mode = "full" if div.is_full_level else "partial"
        ta, td = twist(a, d1, div)
        lhs = -euler_pairing(b, d2, ta, td, div, g) - euler_pairing(a, d1, b, d2, div, g)
        rhs = Fraction(chi(a, div, mode, g) + chi(b, div, mode, g) - chi(a + b, div, mode, g), 2)
        assert lhs == rhs


def test_criterion_09_euler_characteristic_identity_opposite_sign():
    for g, div, c1, c2 in euler_pairs():
        lhs, rhs = euler_identity(c1, c2, div, g)
        assert lhs == rhs


# 10 --------------------------------------------------------------------


def test_criterion_10_selftest_is_deterministic(tmp_path):
    def selftest():
        return subprocess.run([sys.executable, "-m", "irrconn", "selftest", "--cache-dir", str(tmp_path)],
                              capture_output=True, check=False)

    cold = selftest()
    assert list(tmp_path.glob("kernels-*.json"))
    warm = selftest()
    assert cold.returncode == 0 and warm.returncode == 0
    assert cold.stdout == warm.stdout
