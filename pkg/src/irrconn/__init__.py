"""Exact generating functions for moduli of irregular parabolic connections.

The package is organised bottom-up:

exactalg    sparse Laurent polynomials and reduced fractions (FLINT backed)
partition   integer partitions, arms, legs
symfunc     modified Macdonald polynomials in the monomial basis
series      truncated w/z series, plethystic Exp and Log
genfun      Omega^univ, Omega^HLV, Omega^Sch and the DT kernels
moduli      classes, Euler forms and the stack-class drivers
specialize  E-polynomials and virtual Poincare polynomials
cli         command line front end
"""

from .exactalg import ExactArithmeticError, LaurentPoly, Ring, ScalarFraction, get_ring, substitute
from .genfun import (
    GenFunParams,
    check_mellit,
    dt_kernels,
    f_mu,
    l_univ,
    omega_hlv,
    omega_sch,
    omega_univ,
)
from .moduli import (
    DivisorSpec,
    NormalForm,
    StackQuery,
    Truncation,
    Weights,
    chi,
    class_predicates,
    conn_class,
    ddp_poincare,
    euler_pairing,
    graded_class,
    nilpotent_pair_class,
    stabilization_bound,
    stabilized_graded_class,
    star,
    twist,
)
from .partition import Partition, cell_stats, conjugate, enumerate_partitions
from .series import (
    GammaExponent,
    GradedSeries,
    Grading,
    adams,
    coefficient,
    eval_z_one,
    filter_terms,
    invert_unit,
    pleth_exp,
    pleth_log,
    power_structure,
    rescale_w,
)
from .specialize import E_TARGET, P_TARGET, e_p_conn, omega_specialized, specialize_value
from .symfunc import SymFunc, hhl_modified_macdonald, m_coefficient

__version__ = "0.1.0"
