from fractions import Fraction

import pytest

from irrconn.exactalg import ScalarFraction, get_ring
from irrconn.genfun import GenFunParams, l_univ, omega_univ
from irrconn.moduli import DivisorSpec, NormalForm, StackQuery
from irrconn.series import GammaExponent
from irrconn.specialize import (
    E_TARGET,
    P_TARGET,
    ParityError,
    SpecializationTarget,
    e_p_conn,
    omega_specialized,
    specialize_value,
    specialized_kernel,
)


def rank_one_query(g, n):
    div = DivisorSpec.make({"p": n})
    return StackQuery(g, div, GammaExponent.make(1, {("p", 1): 1}), 0, Fraction(1),
                      NormalForm.make({("p", 1): [0] * n}, div))


def test_targets():
    R = get_ring(2)
    qh, a = R.var("qh"), R.var("a1")
    assert specialize_value(qh, "E") == R.mono({"uh": 1, "vh": 1})
    assert specialize_value(a, E_TARGET) == R.var("uh", 2)
    assert specialize_value(qh * a, P_TARGET) == R.var("t", 2)
    with pytest.raises(ValueError):
        SpecializationTarget("X")
    with pytest.raises(ValueError):
        specialize_value(R.var("uh"), "P")


def test_parity():
    R = get_ring(1)
    with pytest.raises(ParityError):
        specialize_value(R.var("qh"), "E", integral=True)
    specialize_value(R.var("qh", 2), "E", integral=True)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_l_function_images(g):
    R = get_ring(g)
    L1 = ScalarFraction.from_laurent(l_univ(R)).substitute({"z": 1})
    u, v, t = R.var("uh", 2), R.var("vh", 2), R.var("t")
    # the pair (alpha_i, q / alpha_i) goes to (u, v)
    assert specialize_value(L1, "E") == (1 - u) ** g * (1 - v) ** g
    assert specialize_value(L1, "P") == (1 - t) ** (2 * g)


@pytest.mark.parametrize("g,delta,npts", [(1, 0, 0), (1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 3, 1)])
def test_closed_forms_match_substitution(g, delta, npts):
    p = GenFunParams(g, tuple(f"p{i}" for i in range(1, npts + 1)), delta, 2, 10)
    for target in (E_TARGET, P_TARGET):
        direct = omega_specialized(p, target)
        assert direct == specialize_value(omega_univ(p), target)
        omega_specialized(p, target, check=True)


def test_specialized_kernel_is_image_of_universal_kernel():
    from irrconn.genfun import dt_kernels

    p = GenFunParams(1, ("p",), 1, 2, 12)
    H = dt_kernels(p)["H_univ"]
    for target in (E_TARGET, P_TARGET):
        assert specialized_kernel(p, target) == specialize_value(H, target)


@pytest.mark.parametrize("g", [1, 2])
@pytest.mark.parametrize("n", [1, 2])
def test_rank_one_routes(g, n):
    q = rank_one_query(g, n)
    R = get_ring(g)
    t, uv = R.var("t"), R.mono({"uh": 2, "vh": 2})
    u, v = R.var("uh", 2), R.var("vh", 2)
    want_e = uv ** g * ((1 - u) * (1 - v)) ** g / (uv - 1)
    want_p = t ** (2 * g) * (1 - t) ** (2 * g) / (t * t - 1)
    for route in ("substitution", "kernel"):
        assert e_p_conn(q, "E", route=route) == want_e
        assert e_p_conn(q, "P", route=route) == want_p
    with pytest.raises(ValueError):
        e_p_conn(q, "E", route="other")


def test_rank_two_routes_agree():
    div = DivisorSpec.make({"p": 2})
    gamma = GammaExponent.make(2, {("p", 1): 1, ("p", 2): 1})
    zeta = NormalForm.make({("p", 1): [1, "1/3"], ("p", 2): [2, "-1/3"]}, div)
    q = StackQuery(1, div, gamma, 0, Fraction(1), zeta)
    for target in ("E", "P"):
        assert e_p_conn(q, target, route="kernel") == e_p_conn(q, target)
