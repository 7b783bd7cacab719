"""Irreducible finite-dimensional representations of the Chekhov-Fock algebra.

Construction: the normal form ``A S A^T = D`` turns the generators into
Weyl monomials ``Y_a = [X^{A_a}]`` which pair up into clock/shift factors.
Each ``X_i`` is a Weyl monomial in the ``Y_a`` (exponents from ``A^{-1}``),
giving a provisional representation.  Its central character is then moved
to the requested one by rescaling every ``X_i``: first with principal
``N``-th roots, then with a root-of-unity twist solving a linear system
over ``Z/N``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .cfalgebra import Ambient, AlgebraElement, central_elements, q_power, weyl_phase
from .skewform import as_int_matrix, normal_form_of, solve_mod, z2_basis
from .triangulation import IdealTriangulation, puncture_matrix, sigma

REL_TOL = 1e-8
NULL_TOL = 1e-8


class RepresentationError(ValueError):
    """Classifying data inconsistent with the center relations."""


def rep_dimension(genus: int, punctures: int, N: int) -> int:
    d = N ** (3 * genus + punctures - 3)
    return d // 2 ** genus if N % 2 == 0 else d


# -- Weyl algebra factors -----------------------------------------------------------

@dataclass(frozen=True)
class WeylFactor:
    """Clock ``U`` and shift ``V`` on ``C^d`` with ``U V = w^2 V U``, ``w`` = ``q_power``."""

    d: int
    q_power: complex
    u: complex = 1.0
    v: complex = 1.0

    @property
    def omega(self) -> complex:
        return self.q_power ** 2

    @cached_property
    def U(self) -> np.ndarray:
        return self.u * np.diag(self.omega ** np.arange(self.d))

    @cached_property
    def V(self) -> np.ndarray:
        return self.v * np.roll(np.eye(self.d, dtype=complex), 1, axis=0)


def weyl_factor(d: int, q_power: complex, u: complex = 1.0, v: complex = 1.0) -> WeylFactor:
    if d < 1:
        raise ValueError("factor size must be positive")
    if u == 0 or v == 0:
        raise ValueError("u and v must be nonzero")
    return WeylFactor(d, complex(q_power), complex(u), complex(v))


def _root_order(N: int, e: int) -> int:
    """Multiplicative order of ``q**e``."""
    e %= 2 * N
    return 2 * N // gcd(2 * N, e * (N + 1) % (2 * N)) if e else 1


# -- classifying data ----------------------------------------------------------------

@dataclass(frozen=True)
class ClassifyingData:
    N: int
    x: np.ndarray
    h: complex
    p_roots: np.ndarray
    a_roots: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=complex))
        object.__setattr__(self, "p_roots", np.asarray(self.p_roots, dtype=complex))
        object.__setattr__(self, "a_roots", np.asarray(self.a_roots, dtype=complex))
        object.__setattr__(self, "h", complex(self.h))

    def to_json(self) -> dict:
        c = lambda z: [float(z.real), float(z.imag)]
        return {"N": self.N, "x": [c(z) for z in self.x], "h": c(self.h),
                "p_roots": [c(z) for z in self.p_roots],
                "a_roots": [c(z) for z in self.a_roots]}

    @classmethod
    def from_json(cls, obj: dict) -> "ClassifyingData":
        z = lambda pair: complex(pair[0], pair[1])
        return cls(int(obj["N"]), [z(v) for v in obj["x"]], z(obj["h"]),
                   [z(v) for v in obj.get("p_roots", [])],
                   [z(v) for v in obj.get("a_roots", [])])


def _eps(S: np.ndarray, N: int, v) -> complex:
    """Sign ``q^{-N^2 sum_{i<i'} v_i v_i' s_ii'}`` relating ``[X^v]^N`` and ``X^{Nv}``."""
    return q_power(N, N * N * weyl_phase(S, v))


def _close(a: complex, b: complex, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def check_data(tri: IdealTriangulation, data: ClassifyingData) -> None:
    """Raise ``RepresentationError`` unless the roots satisfy the power relations."""
    N, S, K = data.N, sigma(tri), puncture_matrix(tri)
    x = data.x
    if x.shape != (tri.n_edges,) or np.any(x == 0):
        raise RepresentationError("need one nonzero weight per edge")
    ones = np.ones(tri.n_edges, dtype=np.int64)
    if not _close(data.h ** N, _eps(S, N, ones) * np.prod(x)):
        raise RepresentationError("h^N does not match the product of all weights")
    if len(data.p_roots) != tri.punctures - 1:
        raise RepresentationError(f"expected {tri.punctures - 1} puncture roots")
    for j, pj in enumerate(data.p_roots):
        if not _close(pj ** N, _eps(S, N, K[j]) * np.prod(x ** K[j])):
            raise RepresentationError(f"puncture root {j + 1} is not an N-th root of its weight")
    if N % 2 == 0 and tri.genus > 0:
        ls = z2_basis(tri).vectors
        if len(data.a_roots) != len(ls):
            raise RepresentationError(f"expected {len(ls)} homology roots for even N")
        for k, (ak, l) in enumerate(zip(data.a_roots, ls)):
            if not _close(ak ** 2, np.prod(x ** l)):
                raise RepresentationError(f"homology root {k + 1} squared does not match")


def classifying_data(tri: IdealTriangulation, N: int, x, h=None, p_roots=None,
                     a_roots=None) -> ClassifyingData:
    """Fill in unspecified roots with principal ones."""
    S, K = sigma(tri), puncture_matrix(tri)
    x = np.asarray(x, dtype=complex)
    ones = np.ones(tri.n_edges, dtype=np.int64)
    if h is None:
        h = (_eps(S, N, ones) * np.prod(x)) ** (1 / N)
    if p_roots is None:
        p_roots = [(_eps(S, N, K[j]) * np.prod(x ** K[j])) ** (1 / N)
                   for j in range(tri.punctures - 1)]
    if a_roots is None:
        a_roots = []
        if N % 2 == 0 and tri.genus > 0:
            a_roots = [np.sqrt(np.prod(x ** l)) for l in z2_basis(tri).vectors]
    data = ClassifyingData(N, x, h, p_roots, a_roots)
    check_data(tri, data)
    return data


# -- representations -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Representation:
    tri: IdealTriangulation
    N: int
    mats: tuple
    invs: tuple
    data: ClassifyingData | None = None

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    @property
    def n(self) -> int:
        return len(self.mats)

    @cached_property
    def ambient(self) -> Ambient:
        return Ambient.of(self.tri, self.N)

    def X(self, i: int) -> np.ndarray:
        return self.mats[i - 1]

    def power(self, i: int, k: int) -> np.ndarray:
        base = self.mats[i - 1] if k >= 0 else self.invs[i - 1]
        return np.linalg.matrix_power(base, abs(k))

    def scalar_of(self, M: np.ndarray, tol: float = REL_TOL) -> complex:
        """The ``c`` with ``M = c Id``; raises if ``M`` is not a homothety."""
        c = np.trace(M) / M.shape[0]
        if np.max(np.abs(M - c * np.eye(M.shape[0]))) > tol * max(1.0, abs(c)):
            raise RepresentationError("matrix is not a scalar multiple of the identity")
        return complex(c)

    def shadow(self) -> np.ndarray:
        """Edge weights ``x_i`` with ``rho(X_i)^N = x_i Id``."""
        return np.array([self.scalar_of(self.power(i, self.N)) for i in range(1, self.n + 1)])

    def central_character(self) -> ClassifyingData:
        ce = central_elements(self.tri, self.N)
        h = self.scalar_of(evaluate(self, ce.H))
        ps = [self.scalar_of(evaluate(self, P)) for P in ce.P[:-1]]
        As = [self.scalar_of(evaluate(self, A)) for A in ce.A]
        return ClassifyingData(self.N, self.shadow(), h, ps, As)

    def puncture_values(self) -> np.ndarray:
        ce = central_elements(self.tri, self.N, with_homology=False)
        return np.array([self.scalar_of(evaluate(self, P)) for P in ce.P])

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "dim": self.dim,
            "matrices": [[[[float(z.real), float(z.imag)] for z in row] for row in M]
                         for M in self.mats],
        }


def _provisional(tri: IdealTriangulation, N: int) -> list[np.ndarray]:
    """Generator matrices with some central character, before rescaling."""
    nf = normal_form_of(tri)
    n = tri.n_edges
    factors = []
    for b in range(nf.n_pairs):
        e = int(nf.D[2 * b, 2 * b + 1])  # Y_U Y_V = q^{2e} Y_V Y_U
        factors.append(weyl_factor(_root_order(N, 2 * e), q_power(N, e)))
    Ainv = nf.A_inv
    mats = []
    for i in range(n):
        c = [int(v) for v in Ainv[i, :]]
        phase = 0
        M = np.ones((1, 1), dtype=complex)
        for b, f in enumerate(factors):
            cu, cv = c[2 * b], c[2 * b + 1]
            phase -= cu * cv * int(nf.D[2 * b, 2 * b + 1])
            local = (np.linalg.matrix_power(f.U if cu >= 0 else np.linalg.inv(f.U), abs(cu))
                     @ np.linalg.matrix_power(f.V if cv >= 0 else f.V.T, abs(cv)))
            M = np.kron(M, local)
        mats.append(q_power(N, phase) * M)
    return mats


def _unit_exponent(z: complex, N: int, what: str) -> int:
    """``s`` with ``z = exp(2 pi i s / N)``; raises if ``z`` is no ``N``-th root of unity."""
    s = round(cmath.phase(z) * N / (2 * cmath.pi)) % N
    if abs(z - cmath.exp(2j * cmath.pi * s / N)) > 1e-6:
        raise RepresentationError(f"{what}: residual {z} is not an N-th root of unity")
    return s


def build_irrep(tri: IdealTriangulation, N: int, data: ClassifyingData) -> Representation:
    """The irreducible representation with the given central character."""
    if data.N != N:
        raise RepresentationError("data was prepared for a different N")
    check_data(tri, data)
    mats0 = _provisional(tri, N)
    invs0 = [np.linalg.inv(M) for M in mats0]
    rep0 = Representation(tri, N, tuple(mats0), tuple(invs0))
    cc0 = rep0.central_character()

    n = tri.n_edges
    K = puncture_matrix(tri)
    r = np.array([(data.x[i] / cc0.x[i]) ** (1 / N) for i in range(n)])
    rows = [np.ones(n, dtype=np.int64)]
    rhs = [_unit_exponent(data.h / (cc0.h * np.prod(r)), N, "H")]
    for j in range(tri.punctures - 1):
        rows.append(K[j])
        rhs.append(_unit_exponent(data.p_roots[j] / (cc0.p_roots[j] * np.prod(r ** K[j])), N,
                                  f"P_{j + 1}"))
    if N % 2 == 0 and len(cc0.a_roots):
        for k, l in enumerate(z2_basis(tri).vectors):
            v = (N // 2) * l
            rows.append(v)
            rhs.append(_unit_exponent(data.a_roots[k] / (cc0.a_roots[k] * np.prod(r ** v)), N,
                                      f"A_{k + 1}"))
    t = solve_mod(as_int_matrix(np.array(rows)), rhs, N)
    if t is None:
        raise RepresentationError("root-of-unity repair system has no solution")
    zeta = np.exp(2j * np.pi * np.array([int(v) for v in t]) / N)
    c = r * zeta
    mats = tuple(c[i] * mats0[i] for i in range(n))
    invs = tuple(invs0[i] / c[i] for i in range(n))
    rep = Representation(tri, N, mats, invs, data)
    errs = relation_errors(rep, data)
    if max(errs.values()) > REL_TOL:
        raise RepresentationError(f"constructed representation fails checks: {errs}")
    return rep


def relation_errors(rep: Representation, data: ClassifyingData | None = None) -> dict[str, float]:
    """Largest deviation of each defining property, relative to matrix scale."""
    S = sigma(rep.tri)
    N, n, d = rep.N, rep.n, rep.dim
    I = np.eye(d)
    comm = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            lhs = rep.mats[i] @ rep.mats[j]
            rhs = q_power(N, 2 * S[i, j]) * rep.mats[j] @ rep.mats[i]
            comm = max(comm, np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs))))
    out = {"commutation": comm}
    if data is not None:
        ce = central_elements(rep.tri, N)
        xs = max(np.max(np.abs(rep.power(i + 1, N) - data.x[i] * I)) / max(1.0, abs(data.x[i]))
                 for i in range(n))
        targets = [(ce.H, data.h)] + list(zip(ce.P[:-1], data.p_roots)) + list(zip(ce.A, data.a_roots))
        # the last puncture element is fixed by H^2 = P_1 ... P_p
        last = data.h ** 2 / np.prod(data.p_roots) if len(ce.P) else None
        if last is not None:
            targets.append((ce.P[-1], last))
        cen = max(np.max(np.abs(evaluate(rep, el) - val * I)) / max(1.0, abs(val))
                  for el, val in targets)
        out.update({"powers": float(xs), "central": float(cen)})
    return out


def evaluate(rep: Representation, elem: AlgebraElement) -> np.ndarray:
    if not rep.ambient.same(elem.ambient):
        raise ValueError("element and representation use different algebras")
    d = rep.dim
    out = np.zeros((d, d), dtype=complex)
    for key in elem.terms:
        M = np.eye(d, dtype=complex)
        for i, k in enumerate(key, start=1):
            if k:
                M = M @ rep.power(i, k)
        out += elem.scalar(key) * M
    return out


# -- commutants and intertwiners ---------------------------------------------------

def intertwiner_space(src: Representation, dst: Representation, tol: float = NULL_TOL) -> np.ndarray:
    """Basis (as ``d x d`` matrices) of ``{L : dst(X_i) L = L src(X_i)}``."""
    d = src.dim
    if dst.dim != d or dst.n != src.n:
        return np.zeros((0, d, dst.dim), dtype=complex)
    I = np.eye(d)
    # column-major vec: vec(A L B) = (B^T kron A) vec(L)
    stack = np.vstack([np.kron(I, B) - np.kron(A.T, I) for A, B in zip(src.mats, dst.mats)])
    _, s, vh = np.linalg.svd(stack)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    null = vh[np.sum(s > tol * smax):].conj()
    return np.array([v.reshape((d, d), order="F") for v in null])


def commutant_dim(rep: Representation, tol: float = NULL_TOL) -> int:
    return len(intertwiner_space(rep, rep, tol))


def direct_sum(a: Representation, b: Representation) -> Representation:
    def blk(M1, M2):
        out = np.zeros((M1.shape[0] + M2.shape[0],) * 2, dtype=complex)
        out[:M1.shape[0], :M1.shape[0]] = M1
        out[M1.shape[0]:, M1.shape[0]:] = M2
        return out
    return Representation(a.tri, a.N, tuple(blk(x, y) for x, y in zip(a.mats, b.mats)),
                          tuple(blk(x, y) for x, y in zip(a.invs, b.invs)))
