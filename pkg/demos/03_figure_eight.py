"""
The figure-eight knot complement
================================

The monodromy "flip 1, flip 2, relabel" on the punctured torus is the
figure-eight bundle.  Its action on shear weights has a fixed point whose
holonomy is the complete hyperbolic structure.  Feeding that point into
the representation machinery yields an intertwiner whose spectrum is an
invariant of the mapping class.
"""

import numpy as np

from qteich.flipaction import Flip, MappingClass, Reindex
from qteich.hypshadow import geometric_fixed_point
from qteich.invariant import intertwiner, invariants_of, preferred_rep, same_projective_spectrum
from qteich.triangulation import punctured_torus

mc = MappingClass(punctured_torus(), [Flip(1), Flip(2), Reindex((3, 1, 2))])

fp = geometric_fixed_point(mc)
print("fixed point:", np.round(fp.x, 12))
print("residual %.1e, puncture product %s" % (fp.residual, np.round(fp.puncture_products, 12)))
print("peripheral trace^2:", np.round(fp.peripheral_trace_sq, 9))
print("volume:", fp.volume)

# %%
# For odd N the fixed point determines a single irreducible representation with
# trivial central character, and pushing it through the mapping class gives an
# isomorphic one.  The intertwiner is unique up to scale.
for N in (3, 5, 7):
    L = intertwiner(mc, preferred_rep(mc, N, fp))
    rep = invariants_of(L)
    print(f"N={N}: nullspace dim {L.nullspace_dim}, |Tr L|^2 / dim = {abs(rep.trace) ** 2 / rep.dim:.6f}")
    print("   spectrum:", np.round(rep.spectrum, 6))

# %%
# Conjugating the monodromy by a flip changes the triangulation but not the
# bundle, and the spectrum agrees up to an overall root of unity.
conj = mc.conjugate([Flip(1)])
L2 = intertwiner(conj, preferred_rep(conj, 3))
print("conjugated N=3 spectrum:", np.round(invariants_of(L2).spectrum, 6))
L1 = intertwiner(mc, preferred_rep(mc, 3, fp))
print("same up to a cube root of unity:", same_projective_spectrum(L1.spectrum(), L2.spectrum()))
