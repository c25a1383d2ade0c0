"""
Two generating functions, one kernel
=====================================

Build the universal and Schiffmann-type generating functions for a genus one
curve with one pole of order two, take plethystic logarithms, and compare the
resulting kernels at z = 1.
"""

from irrconn.genfun import GenFunParams, check_mellit, dt_kernels, omega_sch

# genus 1, one marked point, irregularity 1 (so the pole has order 2)
p = GenFunParams(g=1, points=("p",), delta=1, r_max=2, z_max=40)

# the rank one part of Omega^Sch, printed as a polynomial in z per class
omega = omega_sch(p)
for g_, d, c in list(omega.terms())[:4]:
    print(g_.to_struct(), "z^%d" % d, c.to_text())

# kernels: (1 - z^2) Log Omega^univ and (1 - z) Log Omega^Sch
H = dt_kernels(p)
report = check_mellit(p, kernels=H)
print("status:", report["status"])
for row in report["gammas"]:
    print(row["gamma"], row["status"], row["H_univ"])
