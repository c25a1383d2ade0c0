"""
Stack classes of connections
============================

Motivic classes of stacks of irregular connections with full flags, first
from the z = 1 kernel and then from the graded series with a twist N.
"""

from fractions import Fraction

from irrconn.moduli import (
    DivisorSpec,
    NormalForm,
    StackQuery,
    conn_class,
    stabilization_bound,
    stabilized_graded_class,
)
from irrconn.series import GammaExponent

div = DivisorSpec.make(["p:2"])

# rank one: the answer is q^g L(1) / (q - 1)
gamma = GammaExponent.make(1, {("p", 1): 1})
q1 = StackQuery(1, div, gamma, 0, Fraction(1), NormalForm.make({("p", 1): [0, 0]}, div))
print("rank 1:", conn_class(q1).to_text())

# rank two with non-resonant normal form; eps*d + gamma*zeta must vanish
gamma = GammaExponent.make(2, {("p", 1): 1, ("p", 2): 1})
zeta = NormalForm.make({("p", 1): [1, "1/3"], ("p", 2): [2, "-1/3"]}, div)
q2 = StackQuery(1, div, gamma, 0, Fraction(1), zeta)
value = conn_class(q2)
print("rank 2:", value.to_text())

# the graded formula gives the same class once N is large enough
graded, witness = stabilized_graded_class(q2)
print("graded agrees:", graded == value, "witness N =", witness, "bound =", stabilization_bound(q2))
