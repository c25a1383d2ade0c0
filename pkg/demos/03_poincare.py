"""
E-polynomials and Poincare polynomials
======================================

Specialize stack classes along q -> uv, alpha_i -> u and then u = v = t, and
look at the one-point full-flag family.
"""

from irrconn.moduli import ddp_dimension, ddp_poincare, ddp_query
from irrconn.specialize import e_p_conn

# rank 2, one point with a pole of order 2, genus 1, generic weights
q = ddp_query(1, 2, 2)
print("E:", e_p_conn(q, "E").to_text())
print("P:", e_p_conn(q, "P").to_text())
# the kernel route reaches the same value without the universal ring
print("same via kernel:", e_p_conn(q, "P", route="kernel") == e_p_conn(q, "P"))

for r, n, g in [(1, 2, 1), (2, 2, 1), (2, 3, 1)]:
    res = ddp_poincare(g, n, r)
    print((r, n, g), "d =", ddp_dimension([1] * r, n, g), "H =", res["H"].to_text(),
          "palindromic:", res["palindromic"])
