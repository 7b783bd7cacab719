"""Independent reference computations used to derive and freeze expected values.

None of these reuse the closed-form phase or flip bookkeeping of the package.
"""

from __future__ import annotations

import cmath
import itertools

import mpmath
import numpy as np
import sympy as sp


# -- quantum torus by letter swapping --------------------------------------------

def word_product_phase(S: np.ndarray, word: list[int]) -> tuple[int, tuple[int, ...]]:
    """Bubble-sort a word of generator letters (signed, 1-based) into ascending order.

    Each swap of adjacent letters ``a b -> b a`` with ``a`` after ``b`` in the order
    contributes ``q^{2 s_ab sa sb}``.  Returns the total q-exponent and the exponent
    vector of the sorted monomial.
    """
    w = list(word)
    phase = 0
    changed = True
    while changed:
        changed = False
        for t in range(len(w) - 1):
            a, b = w[t], w[t + 1]
            if abs(a) > abs(b):
                sa, sb = (1 if a > 0 else -1), (1 if b > 0 else -1)
                phase += 2 * int(S[abs(a) - 1, abs(b) - 1]) * sa * sb
                w[t], w[t + 1] = b, a
                changed = True
    expo = [0] * S.shape[0]
    for a in w:
        expo[abs(a) - 1] += 1 if a > 0 else -1
    return phase, tuple(expo)


def monomial_word(expo) -> list[int]:
    out = []
    for i, v in enumerate(expo, start=1):
        out += [i if v > 0 else -i] * abs(int(v))
    return out


# -- planar geometry for genus-zero triangulations -------------------------------

def cross_ratio(z_plus, z_minus, z_l, z_r) -> complex:
    return -(z_l - z_plus) * (z_r - z_minus) / ((z_l - z_minus) * (z_r - z_plus))


def planar_weights(tri, positions) -> np.ndarray:
    """Edge weights of a sphere triangulation whose punctures sit at ``positions``.

    Slot ``a`` runs from corner ``a-1`` to corner ``a``; the corner opposite
    slot ``a`` is ``a+1``.
    """
    cls = tri.corner_class
    x = np.zeros(tri.n_edges, dtype=complex)
    for e, ((t, a), (t2, b)) in tri.edge_slots.items():
        zp = positions[cls[(t, a)]]
        zm = positions[cls[(t, (a - 1) % 3)]]
        zr = positions[cls[(t, (a + 1) % 3)]]
        zl = positions[cls[(t2, (b + 1) % 3)]]
        x[e - 1] = cross_ratio(zp, zm, zl, zr)
    return x


def carry_positions(old, new, positions, i) -> list:
    """Positions indexed by the punctures of ``new = flip(old, i)``.

    Puncture numbering follows traversal order and may change under a flip.
    Triangles away from edge ``i`` keep their (triangle, slot) corners, which
    pins most punctures; any left over are matched by edge endpoint pairs.
    """
    oc, nc = old.corner_class, new.corner_class
    square = {t for t, _ in old.edge_slots[i]}
    fixed = {v: oc[c] for c, v in nc.items() if c[0] not in square}
    rest_new = [v for v in range(new.punctures) if v not in fixed]
    rest_old = [v for v in range(old.punctures) if v not in fixed.values()]

    def ends(tri, cls, m):
        return {e: sorted((m[cls[(t, (a - 1) % 3)]], m[cls[(t, a)]]))
                for e, ((t, a), _) in tri.edge_slots.items() if e != i}

    old_ends = ends(old, oc, list(range(old.punctures)))
    for perm in itertools.permutations(rest_old):
        m = {**fixed, **dict(zip(rest_new, perm))}
        if ends(new, nc, m) == old_ends:
            return [positions[m[v]] for v in range(new.punctures)]
    raise AssertionError("could not match punctures across the flip")


def square_vertices_distinct(tri, i) -> bool:
    cls = tri.corner_class
    (t, a), (t2, b) = tri.edge_slots[i]
    verts = {cls[(t, a)], cls[(t, (a - 1) % 3)], cls[(t, (a + 1) % 3)], cls[(t2, (b + 1) % 3)]}
    return len(verts) == 4


# -- symbolic weights for the torus ----------------------------------------------

def torus_case4_flip(x: list, i: int, j: int, k: int) -> list:
    """Classical flip on the punctured torus with the textbook formulas."""
    y = list(x)
    xi = x[i - 1]
    y[i - 1] = 1 / xi
    y[j - 1] = (1 + xi) ** 2 * x[j - 1]
    y[k - 1] = x[k - 1] / (1 + 1 / xi) ** 2
    return y


def figure_eight_fixed_point_exact():
    w = sp.exp(2 * sp.pi * sp.I / 3)
    return [sp.conjugate(w), sp.Integer(1), w]


# -- dilogarithm ------------------------------------------------------------------

def bloch_wigner(z: complex) -> float:
    z = mpmath.mpc(z)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


FIGURE_EIGHT_VOLUME = 2.0298832128193072500424051085490405665  # 2 D(e^{i pi/3})


def eisenstein_distance(z: complex) -> float:
    """Brute-force distance to the lattice Z[e^{2 pi i / 3}] near ``z``."""
    w = cmath.exp(2j * cmath.pi / 3)
    best = float("inf")
    for a in range(int(z.real) - 4, int(z.real) + 5):
        for b in range(int(z.imag) - 6, int(z.imag) + 7):
            best = min(best, abs(z - (a + b * w)))
    return best
