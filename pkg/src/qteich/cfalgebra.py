"""Quantum torus elements with exact root-of-unity phases.

Throughout, ``q = -exp(i pi / N)``.  Then ``q**2`` is a primitive ``N``-th
root of unity and ``q**N = (-1)**(N + 1)``.  A phase is stored as an integer
exponent of ``q`` modulo ``2N`` and only turned into a complex number on
evaluation.

An element is a finite sum of terms ``c * q**e * X_1**v_1 ... X_n**v_n`` in
ascending index order; the generators satisfy ``X_i X_j = q**(2 s_ij) X_j X_i``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .skewform import z2_basis
from .triangulation import IdealTriangulation, puncture_matrix, sigma


def q_value(N: int) -> complex:
    return -cmath.exp(1j * cmath.pi / N)


def q_power(N: int, e: int) -> complex:
    """``q**e`` evaluated from the reduced exponent."""
    e %= 2 * N
    return cmath.exp(1j * cmath.pi * (e * (N + 1) % (2 * N)) / N)


def form(S: np.ndarray, v, w) -> int:
    """``sigma(v, w) = v^T S w`` as a Python int."""
    return int(np.asarray(v, dtype=np.int64) @ S @ np.asarray(w, dtype=np.int64))


def normal_order_phase(S: np.ndarray, v, w) -> int:
    """Exponent ``e`` with ``X^v X^w = q**e X^(v+w)`` for ordered monomials."""
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    # move each X_j^{w_j} left past X_i^{v_i} with i > j
    return int(2 * (v @ np.tril(S, -1) @ w))


def weyl_phase(S: np.ndarray, v) -> int:
    """The Weyl-ordering exponent ``-sum_{i<i'} v_i v_i' s_ii'``."""
    v = np.asarray(v, dtype=np.int64)
    return int(-(v @ np.triu(S, 1) @ v))


class AmbientMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Ambient:
    """The commutation matrix and the order ``N`` shared by a family of elements."""

    S: np.ndarray
    N: int

    def __post_init__(self):
        S = np.asarray(self.S, dtype=np.int64)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or (S + S.T).any():
            raise ValueError("commutation matrix must be square and antisymmetric")
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "S", S)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def modulus(self) -> int:
        return 2 * self.N

    def same(self, other: "Ambient") -> bool:
        return self is other or (self.N == other.N and np.array_equal(self.S, other.S))

    @classmethod
    def of(cls, tri: IdealTriangulation, N: int) -> "Ambient":
        return cls(sigma(tri), N)

    # constructors
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return self.monomial([0] * self.n)

    def monomial(self, expo, coeff: complex = 1.0, phase: int = 0) -> "AlgebraElement":
        key = tuple(int(x) for x in expo)
        if len(key) != self.n:
            raise ValueError(f"exponent of length {len(key)} for {self.n} generators")
        return AlgebraElement(self, {key: {phase % self.modulus: complex(coeff)}})

    def X(self, i: int) -> "AlgebraElement":
        """Generator ``X_i`` (1-based)."""
        e = [0] * self.n
        e[i - 1] = 1
        return self.monomial(e)

    def weyl(self, expo) -> "AlgebraElement":
        """The Weyl-ordered monomial ``[X^expo]``."""
        return self.monomial(expo, phase=weyl_phase(self.S, expo))


Terms = dict[tuple[int, ...], dict[int, complex]]


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    ambient: Ambient
    terms: Terms = field(default_factory=dict)

    def __post_init__(self):
        clean: Terms = {}
        for key, phases in self.terms.items():
            ph = {int(e) % self.ambient.modulus: complex(c) for e, c in phases.items() if c != 0}
            if ph:
                clean[key] = ph
        object.__setattr__(self, "terms", clean)

    def _check(self, other: "AlgebraElement"):
        if not self.ambient.same(other.ambient):
            raise AmbientMismatch("elements live in different algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.ambient.one() * complex(other)
        self._check(other)
        out: Terms = {k: dict(v) for k, v in self.terms.items()}
        for key, phases in other.terms.items():
            slot = out.setdefault(key, {})
            for e, c in phases.items():
                slot[e] = slot.get(e, 0) + c
        return AlgebraElement(self.ambient, out)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = complex(other)
            return AlgebraElement(self.ambient, {
                k: {e: c * v for e, v in ph.items()} for k, ph in self.terms.items()})
        self._check(other)
        S, mod = self.ambient.S, self.ambient.modulus
        out: Terms = {}
        for k1, ph1 in self.terms.items():
            for k2, ph2 in other.terms.items():
                shift = normal_order_phase(S, k1, k2)
                key = tuple(a + b for a, b in zip(k1, k2))
                slot = out.setdefault(key, {})
                for e1, c1 in ph1.items():
                    for e2, c2 in ph2.items():
                        e = (e1 + e2 + shift) % mod
                        slot[e] = slot.get(e, 0) + c1 * c2
        return AlgebraElement(self.ambient, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ambient.one()
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "AlgebraElement":
        """Inverse of a single nonzero monomial."""
        if len(self.terms) != 1:
            raise ValueError("only monomials are invertible here")
        (key, phases), = self.terms.items()
        c = self.scalar(key)
        neg = tuple(-x for x in key)
        # X^v X^{-v} = q^{phase(v,-v)}
        shift = normal_order_phase(self.ambient.S, key, neg)
        return self.ambient.monomial(neg, 1 / c, -shift)

    def scalar(self, key) -> complex:
        """Numeric coefficient of the ordered monomial ``X^key``."""
        N = self.ambient.N
        return sum(c * q_power(N, e) for e, c in self.terms.get(tuple(key), {}).items())

    def allclose(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.scalar(k) - other.scalar(k)) <= tol for k in keys)

    def commutes_with(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        return (self * other).allclose(other * self, tol)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return all(abs(self.scalar(k)) <= tol for k in self.terms)

    def __repr__(self):
        return f"AlgebraElement({self.pretty()})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            mono = "".join(f"X{i}^{a}" for i, a in enumerate(key, start=1) if a) or "1"
            for e, c in sorted(self.terms[key].items()):
                parts.append(f"({c:.6g}) * q^{e} * {mono}")
        return " + ".join(parts)


@dataclass(frozen=True)
class CentralElements:
    H: AlgebraElement
    P: list[AlgebraElement]
    A: list[AlgebraElement]
    l_vectors: list[np.ndarray]


def central_elements(tri: IdealTriangulation, N: int, with_homology: bool | None = None) -> CentralElements:
    """``H``, the puncture elements ``P_1..P_p`` and, for even ``N``, ``A_1..A_2g``.

    ``A_k`` depends on the deterministic homology basis from ``z2_basis``.
    """
    amb = Ambient.of(tri, N)
    if with_homology is None:
        with_homology = N % 2 == 0
    if with_homology and N % 2:
        raise ValueError("A_k are only defined for even N")
    K = puncture_matrix(tri)
    H = amb.weyl(np.ones(tri.n_edges, dtype=np.int64))
    P = [amb.weyl(K[j]) for j in range(tri.punctures)]
    A, ls = [], []
    if with_homology and tri.genus > 0:
        ls = z2_basis(tri).vectors
        A = [amb.weyl((N // 2) * l) for l in ls]
    return CentralElements(H, P, A, ls)
