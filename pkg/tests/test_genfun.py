import pytest

from irrconn.exactalg import ScalarFraction, get_ring
from irrconn.genfun import (
    GenFunParams,
    check_admissible,
    check_mellit,
    dt_kernels,
    f_mu,
    hlv_term,
    l_univ,
    omega_hlv,
    omega_sch,
    omega_univ,
    substitution_identity,
)
from irrconn.partition import Partition, partitions_of
from irrconn.series import _trunc, eval_z_one, pleth_log


def frac(p):
    return ScalarFraction.from_laurent(p)


def test_l_univ_small():
    assert frac(l_univ(get_ring(0))) == get_ring(0).one()
    R = get_ring(1)
    a, z, q = R.var("a1"), R.var("z"), R.var("qh", 2)
    assert frac(l_univ(R)) == (1 - a * z) * (1 - q / a * z)


@pytest.mark.parametrize("g", [0, 1, 2, 3])
def test_functional_equation(g):
    R = get_ring(g)
    q, z = R.var("qh", 2), R.var("z")
    L = frac(l_univ(R))
    assert L.substitute({"z": 1 / (q * z)}) == q ** -g * z ** (-2 * g) * L
    assert L.degree_range("z") == (0, 2 * g)


def test_constant_terms():
    p = GenFunParams(1, ("p",), 1, 2, 12)
    for build in (omega_univ, omega_hlv, omega_sch):
        assert build(p).constant_term() == p.ring.one()


@pytest.mark.parametrize("g", [1, 2])
def test_rank_one_term_of_omega_univ(g):
    p = GenFunParams(g, (), 0, 1, 20)
    R, zi = p.ring, p.ring.index("z")
    q, z = R.var("qh", 2), R.var("z")
    c = omega_univ(p).data[(1,)]
    target = R.var("qh", 2 * g) * frac(l_univ(R)).substitute({"z": z / q})
    assert _trunc(c * (z * z - 1) * (1 - q), zi, 20) == target


@pytest.mark.parametrize("g", [1, 2, 3])
def test_rank_one_kernel(g):
    p = GenFunParams(g, (), 0, 1, 30)
    R = p.ring
    q = R.var("qh", 2)
    want = frac(l_univ(R)).substitute({"z": 1}) / (q - 1)
    H = dt_kernels(p)
    assert eval_z_one(H["H_univ"])[(1,)] == want
    assert eval_z_one(H["H_sch"])[(1,)] == want
    assert H["H_univ"].constant_term().is_zero()


def test_n_ratio_single_cell():
    R = get_ring(1)
    a, z, q = R.var("a1"), R.var("z"), R.var("qh", 2)
    # N_(1)(u) = (1 - u q)(z - u^-1)
    n = lambda u: (1 - u * q) * (z - 1 / u)
    assert hlv_term((1,), 1, 0).to_fraction() == n(1 / a) / n(R.one())


def test_f_mu_small():
    R = get_ring(2)
    assert f_mu((), 2).to_fraction() == R.one()
    z = R.var("z")
    for m in (1, 2, 3):
        want = R.one()
        for k in R.alpha_names():
            inv = 1 / R.var(k)
            want = want * (1 - inv) / (1 - inv * z ** m)
        assert f_mu((m,), 2).to_fraction() == want


def test_sch_has_no_alpha_denominators():
    p = GenFunParams(2, ("p",), 1, 2, 12)
    for c in omega_sch(p).data.values():
        den = c.denominator()
        assert all(den.degree_range(a) == (0, 0) for a in p.ring.alpha_names())


@pytest.mark.parametrize("g", [1, 2])
@pytest.mark.parametrize("delta", [0, 1, 2])
def test_substitution_identity(g, delta):
    for m in range(4):
        for mu in partitions_of(m):
            lhs, rhs = substitution_identity(mu, g, delta)
            assert lhs == rhs


def test_mellit_small():
    rep = check_mellit(GenFunParams(1, (), 0, 2, 40))
    assert rep["status"] == "equal"
    rep = check_mellit(GenFunParams(1, ("p",), 1, 2, 40))
    assert rep["status"] == "equal" and len(rep["gammas"]) == 5
    rep = check_mellit(GenFunParams(1, (), 0, 0, 10))
    assert rep["status"] == "equal" and rep["gammas"] == []


def test_mellit_inconclusive_when_truncated_too_low():
    rep = check_mellit(GenFunParams(2, ("p",), 2, 2, 8))
    assert rep["status"] == "inconclusive"


def test_admissibility_and_a_control():
    p = GenFunParams(1, ("p",), 1, 3, 20)
    assert check_admissible(p) == []
    # without the (q - 1) factor the denominators stay
    R = p.ring
    A = pleth_log(omega_hlv(p)).scale(1 - R.var("z"))
    assert any(not c.is_laurent() for c in A.data.values())


def test_params_validation():
    with pytest.raises(ValueError):
        GenFunParams(-1)
    with pytest.raises(ValueError):
        GenFunParams(1, ("p", "p"))
    assert GenFunParams(0).experimental


def test_partition_arg_types():
    assert f_mu(Partition((2, 1)), 1).to_fraction() == f_mu((2, 1), 1).to_fraction()
