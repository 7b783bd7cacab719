"""
Building representations of a quantum torus
===========================================

We start from the once-punctured torus, read off its spike-count form,
bring that form to block normal form and then assemble an irreducible
representation for a handful of odd and even N.
"""

import numpy as np

from qteich.cfalgebra import central_elements, q_power
from qteich.repbuild import build_irrep, classifying_data, commutant_dim, evaluate, rep_dimension
from qteich.skewform import normal_form_of
from qteich.triangulation import four_punctured_sphere, punctured_torus, sigma

tri = punctured_torus()
print(tri.to_text())

# The form counts corners: entry (i, j) is +1 for every corner with edge i on the
# left and j on the right, -1 for the reverse.
S = sigma(tri)
print("sigma =\n", S)

# A unimodular change of basis puts it into blocks; the torus has a single 2-block
# and one kernel direction (the puncture).
nf = normal_form_of(tri)
print("A =\n", nf.A)
print("A S A^T =\n", nf.D)

# %%
# Shear weights x are the classical shadow; the remaining choices are an N-th root
# h of x_1 x_2 x_3 and, on surfaces with several punctures, roots of the puncture
# products.
rng = np.random.default_rng(0)
x = np.exp(rng.normal(size=3) + 1j * rng.normal(size=3))

for N in (3, 4, 5):
    data = classifying_data(tri, N, x)
    rep = build_irrep(tri, N, data)
    X1, X2 = rep.mats[0], rep.mats[1]
    q2 = q_power(N, 2 * S[0, 1])
    print(f"N={N}: dim {rep.dim} (formula {rep_dimension(tri.genus, tri.punctures, N)}),",
          f"|X1 X2 - q^(2s) X2 X1| = {np.abs(X1 @ X2 - q2 * X2 @ X1).max():.1e},",
          f"commutant {commutant_dim(rep)}")

# %%
# H is central, so it acts as the scalar h.
N = 5
data = classifying_data(tri, N, x)
rep = build_irrep(tri, N, data)
H = evaluate(rep, central_elements(tri, N).H)
print("H / h - 1 on the diagonal:", np.abs(np.diag(H) / data.h - 1).max())

# %%
# Four punctures give a 3-dimensional representation for N = 3 and one central
# element per puncture.
sphere = four_punctured_sphere()
rep = build_irrep(sphere, 3, classifying_data(sphere, 3, np.exp(rng.normal(size=6))))
print("four-punctured sphere, N=3: dim", rep.dim)
print("puncture values:", np.round(rep.puncture_values(), 6))
