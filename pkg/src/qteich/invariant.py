"""Intertwiners of representations fixed by a mapping class, and their invariants.

For odd ``N`` the preferred representation has the geometric fixed point as
shadow and all central roots equal to 1.  Pushing it around the mapping
class gives an isomorphic representation; the intertwiner ``L`` between the
two is unique up to scale and its projectivized spectrum is the invariant.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .flipaction import MappingClass, push_rep
from .hypshadow import FixedPoint, geometric_fixed_point
from .repbuild import (
    ClassifyingData,
    Representation,
    build_irrep,
    intertwiner_space,
)

__all__ = [
    "MappingClass", "IntertwinerError", "Intertwiner", "InvariantReport",
    "preferred_rep", "intertwiner", "invariants_of", "orbit_invariant",
    "canonical_spectrum", "same_projective_spectrum",
]

RESIDUAL_TOL = 1e-8


class IntertwinerError(RuntimeError):
    pass


def preferred_data(mc: MappingClass, N: int, fp: FixedPoint | None = None) -> ClassifyingData:
    if N % 2 == 0:
        raise ValueError("the preferred representation needs odd N")
    fp = fp or geometric_fixed_point(mc)
    if not fp.parabolic:
        raise ValueError("fixed point has a non-parabolic puncture")
    p = mc.base.punctures
    return ClassifyingData(N, fp.x, 1.0, np.ones(p - 1))


def preferred_rep(mc: MappingClass, N: int, fp: FixedPoint | None = None) -> Representation:
    """Irrep with the geometric fixed point as shadow and ``H = P_j = 1``."""
    return build_irrep(mc.base, N, preferred_data(mc, N, fp))


def _canonical_scale(L: np.ndarray) -> np.ndarray:
    d = L.shape[0]
    L = L / np.linalg.det(L) ** (1 / d)
    tr = np.trace(L)
    if abs(tr) > 1e-12:
        # rotate by a d-th root of unity so that arg Tr L lies in [0, 2 pi / d)
        m = np.floor((cmath.phase(tr) % (2 * np.pi)) / (2 * np.pi / d))
        L = L * np.exp(-2j * np.pi * m / d)
    return L


@dataclass
class Intertwiner:
    L: np.ndarray
    nullspace_dim: int
    residual: float
    pushed: Representation | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    def spectrum(self) -> np.ndarray:
        return canonical_spectrum(np.linalg.eigvals(self.L))


def intertwiner(mc: MappingClass, rep: Representation, power: int = 1) -> Intertwiner:
    """``L`` with ``rho'(X_i) L = L rho(X_i)`` where ``rho'`` is ``rep`` pushed ``power`` times around ``mc``."""
    if rep.tri.canonical != mc.base.canonical:
        raise IntertwinerError("representation lives on a different triangulation")
    pushed = rep
    for _ in range(power):
        pushed, _ = push_rep(pushed, mc.moves)
    space = intertwiner_space(rep, pushed)
    if len(space) != 1:
        kind = "not fixed by the mapping class" if len(space) == 0 else "reducible"
        raise IntertwinerError(f"solution space has dimension {len(space)}: representation {kind}")
    L = _canonical_scale(space[0])
    res = max(np.max(np.abs(B @ L - L @ A)) / max(1.0, np.max(np.abs(B)))
              for A, B in zip(rep.mats, pushed.mats))
    if res > RESIDUAL_TOL:
        raise IntertwinerError(f"intertwining residual {res:.2e}")
    return Intertwiner(L, 1, float(res), pushed)


# -- invariants -------------------------------------------------------------------

def canonical_spectrum(eigs) -> np.ndarray:
    """Eigenvalues scaled to product 1, rotated by a root of unity so their sum has
    argument in ``[0, 2 pi / d)``, sorted by modulus then argument."""
    eigs = np.asarray(eigs, dtype=complex)
    d = len(eigs)
    eigs = eigs / np.prod(eigs) ** (1 / d)
    s = eigs.sum()
    if abs(s) > 1e-9:
        m = np.floor((cmath.phase(s) % (2 * np.pi)) / (2 * np.pi / d))
        eigs = eigs * np.exp(-2j * np.pi * m / d)
    key = [(round(abs(z), 7), round(cmath.phase(z) % (2 * np.pi), 7)) for z in eigs]
    return eigs[np.lexsort(np.array(key).T[::-1])]


def _multiset_close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Greedy matching; adequate for the well-separated spectra compared here."""
    rest = list(b)
    for z in a:
        dist = [abs(z - w) for w in rest]
        k = int(np.argmin(dist))
        if dist[k] > tol * max(1.0, abs(z)):
            return False
        rest.pop(k)
    return True


def same_projective_spectrum(a, b, tol: float = 1e-7) -> bool:
    """Whether two eigenvalue lists agree up to a common nonzero scale."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    d = len(a)
    a = a / np.prod(a) ** (1 / d)
    b = b / np.prod(b) ** (1 / d)
    return any(_multiset_close(a * np.exp(2j * np.pi * m / d), b, tol) for m in range(d))


@dataclass
class InvariantReport:
    dim: int
    spectrum: np.ndarray
    trace: complex
    trace_product: complex

    def to_json(self) -> dict:
        c = lambda z: [float(z.real), float(z.imag)]
        return {"dim": self.dim, "spectrum": [c(z) for z in self.spectrum],
                "trace": c(self.trace), "trace_product": c(self.trace_product)}


def invariants_of(L) -> InvariantReport:
    """Projectivized spectrum, trace up to a root of unity, and ``Tr(L) Tr(L^-1)``."""
    M = L.L if isinstance(L, Intertwiner) else np.asarray(L, dtype=complex)
    M = _canonical_scale(M)
    return InvariantReport(M.shape[0], canonical_spectrum(np.linalg.eigvals(M)),
                           complex(np.trace(M)), complex(np.trace(M) * np.trace(np.linalg.inv(M))))


def _same_character(a: ClassifyingData, b: ClassifyingData, tol: float = 1e-8) -> bool:
    pairs = [(a.x, b.x), ([a.h], [b.h]), (a.p_roots, b.p_roots), (a.a_roots, b.a_roots)]
    return all(np.allclose(u, v, rtol=tol, atol=tol) for u, v in pairs)


@dataclass
class OrbitInvariant:
    k: int
    intertwiner: Intertwiner


def orbit_invariant(mc: MappingClass, rep: Representation, max_k: int | None = None) -> OrbitInvariant:
    """Smallest ``k`` with ``rep`` pushed ``k`` times isomorphic to ``rep``, and the intertwiner for ``mc^k``."""
    target = rep.central_character()
    bound = max_k or rep.N ** mc.base.punctures
    cur = rep
    for k in range(1, bound + 1):
        cur, _ = push_rep(cur, mc.moves)
        # read P_j with the base's puncture numbering, not the pushed triangle order
        on_base = Representation(mc.base, cur.N, cur.mats, cur.invs)
        if _same_character(target, on_base.central_character()):
            return OrbitInvariant(k, intertwiner(mc, rep, power=k))
    raise IntertwinerError(f"orbit did not close within {bound} steps")
