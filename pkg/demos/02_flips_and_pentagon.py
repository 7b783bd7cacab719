"""
Flips, their quantum versions, and the pentagon
===============================================

A diagonal exchange changes the triangulation and the shear weights
rationally.  The quantum version conjugates the representation.  Doing
five alternating flips in a pentagon brings back the original
triangulation up to relabeling, and the representation comes back too.
"""

import numpy as np

from qteich.flipaction import Flip, Reindex, flip_rep, flip_weights, push_rep
from qteich.repbuild import build_irrep, classifying_data
from qteich.triangulation import classify_flip, five_punctured_sphere, flip, punctured_torus

tri = punctured_torus()
x = np.array([2.0, 0.5, 1.5])
print("case of edge 1 on the torus:", classify_flip(tri, 1).case.value)

y = flip_weights(tri, x, 1)
print("weights before", x, "after", np.round(y.real, 6))
# flipping the same edge again undoes it
print("back:", np.round(flip_weights(flip(tri, 1), y, 1).real, 12))

# %%
# On the representation side, the flipped matrices still satisfy the commutation
# relations of the new triangulation and their N-th powers are the new weights.
N = 3
rep = build_irrep(tri, N, classifying_data(tri, N, x.astype(complex)))
new = flip_rep(rep, 1)
print("shadow after flip:", np.round(new.shadow().real, 6))
twice = flip_rep(new, 1)
print("flip twice, max deviation:", max(np.abs(a - b).max() for a, b in zip(twice.mats, rep.mats)))

# %%
# Pentagon on the five-punctured sphere.  Edges 6 and 7 are two diagonals of a
# pentagon; alternating five flips returns to the start with 6 and 7 swapped.
sphere = five_punctured_sphere()
rng = np.random.default_rng(1)
w = np.exp(rng.normal(size=9) * 0.3 + 1j * rng.normal(size=9) * 0.3)
rep = build_irrep(sphere, N, classifying_data(sphere, N, w))
moves = [Flip(6), Flip(7), Flip(6), Flip(7), Flip(6), Reindex((1, 2, 3, 4, 5, 7, 6, 8, 9))]
out, _ = push_rep(rep, moves)
print("pentagon returns to", out.tri == sphere)
print("pentagon, max deviation:", max(np.abs(a - b).max() for a, b in zip(out.mats, rep.mats)))
