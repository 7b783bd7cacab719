"""Exact integer normal forms for the spike-count form and its kernels.

All arithmetic here uses Python integers (numpy object arrays), so entries
never overflow and unimodularity is exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd

import numpy as np

from .triangulation import IdealTriangulation, puncture_matrix, sigma


class NormalFormError(RuntimeError):
    """The reduced form does not have the expected block profile."""


def as_int_matrix(M) -> np.ndarray:
    M = np.asarray(M)
    out = np.empty(M.shape, dtype=object)
    for idx in np.ndindex(M.shape):
        out[idx] = int(M[idx])
    return out


def int_identity(n: int) -> np.ndarray:
    return as_int_matrix(np.eye(n, dtype=np.int64))


def int_det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [[int(x) for x in row] for row in np.asarray(M)]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# -- skew-symmetric reduction ------------------------------------------------

class _Congruence:
    """Simultaneous row/column operations on a skew matrix, tracked in A and A^-1."""

    def __init__(self, S):
        self.M = as_int_matrix(S)
        n = self.M.shape[0]
        self.A = int_identity(n)
        self.Ainv = int_identity(n)

    def swap(self, r, s):
        if r == s:
            return
        for X in (self.M, self.A):
            X[[r, s], :] = X[[s, r], :]
        self.M[:, [r, s]] = self.M[:, [s, r]]
        self.Ainv[:, [r, s]] = self.Ainv[:, [s, r]]

    def add(self, src, dst, c):
        """row_dst += c * row_src, and the same for columns."""
        if c == 0:
            return
        self.M[dst, :] = self.M[dst, :] + c * self.M[src, :]
        self.M[:, dst] = self.M[:, dst] + c * self.M[:, src]
        self.A[dst, :] = self.A[dst, :] + c * self.A[src, :]
        self.Ainv[:, src] = self.Ainv[:, src] - c * self.Ainv[:, dst]


def _reduce_skew(S) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[int]]:
    """Bring ``S`` to blocks ``[[0, -d], [d, 0]]`` with ``d1 | d2 | ...``.

    Returns ``(A, A_inv, D, ds)`` with ``A S A^T = D``.
    """
    C = _Congruence(S)
    n = C.M.shape[0]
    ds = []
    o = 0
    while o + 1 < n:
        sub = C.M[o:, o:]
        nz = [(abs(sub[r, c]), r, c) for r in range(n - o) for c in range(n - o) if sub[r, c] != 0]
        if not nz:
            break
        _, r, c = min(nz)
        r, c = r + o, c + o
        C.swap(o, r)
        if c == o:
            c = r
        C.swap(o + 1, c)
        while True:
            d = C.M[o, o + 1]
            smaller = False
            for s in range(o + 2, n):
                t = C.M[o, s] // d
                C.add(o + 1, s, -t)
                t2 = C.M[o + 1, s] // d
                C.add(o, s, t2)
                if C.M[o, s] != 0 or C.M[o + 1, s] != 0:
                    smaller = True
            if smaller:
                # a nonzero remainder smaller than |d| now sits in row o or o+1
                rest = [(abs(C.M[a, s]), a, s) for a in (o, o + 1)
                        for s in range(o + 2, n) if C.M[a, s] != 0]
                _, a, s = min(rest)
                if a == o:
                    C.swap(o + 1, s)
                else:
                    C.swap(o, o + 1)
                    C.swap(o + 1, s)
                continue
            bad = [(r2, c2) for r2 in range(o + 2, n) for c2 in range(o + 2, n)
                   if C.M[r2, c2] % d != 0]
            if bad:
                C.add(bad[0][0], o, 1)
                continue
            break
        if C.M[o, o + 1] > 0:
            C.swap(o, o + 1)
        ds.append(int(-C.M[o, o + 1]))
        o += 2
    return C.A, C.Ainv, C.M, ds


@dataclass(frozen=True)
class SkewNormalForm:
    A: np.ndarray
    A_inv: np.ndarray
    D: np.ndarray
    genus: int
    k: int
    punctures: int

    @property
    def block_profile(self) -> tuple[int, int, int]:
        return self.genus, self.k, self.punctures

    @property
    def n_pairs(self) -> int:
        return self.genus + self.k

    def block_value(self, b: int) -> int:
        """``d`` for the ``b``-th block ``[[0, -d], [d, 0]]``."""
        return int(self.D[2 * b + 1, 2 * b])


def normal_form(S, genus: int, punctures: int) -> SkewNormalForm:
    """Unimodular ``A`` with ``A S A^T`` block diagonal.

    Blocks ``[[0, -2], [2, 0]]`` come first (``genus`` of them), then
    ``k = 2g + p - 3`` blocks ``[[0, -1], [1, 0]]``, then ``p`` zero rows.
    """
    S = as_int_matrix(S)
    n = S.shape[0]
    A, Ainv, D, ds = _reduce_skew(S)
    k = 2 * genus + punctures - 3
    if sorted(ds) != [1] * k + [2] * genus or n - 2 * len(ds) != punctures:
        raise NormalFormError(
            f"block values {ds} with {n - 2 * len(ds)} zero rows do not match "
            f"g={genus}, k={k}, p={punctures}")
    # reorder: two-blocks first, then one-blocks, then the kernel rows
    order = [b for b, d in enumerate(ds) if d == 2] + [b for b, d in enumerate(ds) if d == 1]
    rows = [r for b in order for r in (2 * b, 2 * b + 1)] + list(range(2 * len(ds), n))
    A = A[rows, :]
    Ainv = Ainv[:, rows]
    D = A.dot(S).dot(A.T)
    return SkewNormalForm(A, Ainv, D, genus, k, punctures)


def normal_form_of(tri: IdealTriangulation) -> SkewNormalForm:
    return normal_form(sigma(tri), tri.genus, tri.punctures)


# -- Smith normal form and congruences -------------------------------------------

def smith_normal_form(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(U, S, V)`` with ``U M V = S`` diagonal, ``U``, ``V`` unimodular."""
    S = as_int_matrix(M)
    m, n = S.shape
    U, V = int_identity(m), int_identity(n)
    for o in range(min(m, n)):
        while True:
            nz = [(abs(S[r, c]), r, c) for r in range(o, m) for c in range(o, n) if S[r, c] != 0]
            if not nz:
                return U, S, V
            _, r, c = min(nz)
            S[[o, r], :] = S[[r, o], :]
            U[[o, r], :] = U[[r, o], :]
            S[:, [o, c]] = S[:, [c, o]]
            V[:, [o, c]] = V[:, [c, o]]
            d = S[o, o]
            dirty = False
            for r2 in range(o + 1, m):
                t = S[r2, o] // d
                S[r2, :] = S[r2, :] - t * S[o, :]
                U[r2, :] = U[r2, :] - t * U[o, :]
                dirty |= S[r2, o] != 0
            for c2 in range(o + 1, n):
                t = S[o, c2] // d
                S[:, c2] = S[:, c2] - t * S[:, o]
                V[:, c2] = V[:, c2] - t * V[:, o]
                dirty |= S[o, c2] != 0
            if dirty:
                continue
            bad = [r2 for r2 in range(o + 1, m) if any(S[r2, c2] % d for c2 in range(o + 1, n))]
            if bad:
                S[o, :] = S[o, :] + S[bad[0], :]
                U[o, :] = U[o, :] + U[bad[0], :]
                continue
            if d < 0:
                S[o, :] = -S[o, :]
                U[o, :] = -U[o, :]
            break
    return U, S, V


def solve_mod(M, b, N: int) -> np.ndarray | None:
    """An integer ``t`` with ``M t = b (mod N)``, or ``None`` if there is none."""
    M = as_int_matrix(M)
    m, n = M.shape
    U, S, V = smith_normal_form(M)
    rhs = U.dot(as_int_matrix(np.asarray(b).reshape(m)))
    u = [0] * n
    for i in range(m):
        d = int(S[i, i]) if i < n else 0
        bi = int(rhs[i]) % N
        if d == 0:
            if bi != 0:
                return None
            continue
        g = gcd(d, N)
        if bi % g:
            return None
        Ng = N // g
        u[i] = (bi // g) * pow((d // g) % Ng, -1, Ng) % Ng if Ng > 1 else 0
    t = V.dot(as_int_matrix(np.array(u)))
    return as_int_matrix(np.array([int(x) % N for x in t]))


# -- kernels ---------------------------------------------------------------------

@dataclass(frozen=True)
class KernelBasis:
    generators: list[np.ndarray]


def kernel_basis(tri: IdealTriangulation) -> KernelBasis:
    """The all-ones vector and the puncture rows ``K_1 .. K_{p-1}``."""
    K = puncture_matrix(tri)
    gens = [np.ones(tri.n_edges, dtype=np.int64)] + [K[i].copy() for i in range(tri.punctures - 1)]
    return KernelBasis(gens)


@dataclass(frozen=True)
class Z2HomologyBasis:
    """Edge-crossing indicators of dual-graph cycles giving a basis of H_1(closed surface; Z/2)."""

    vectors: list[np.ndarray]
    cycles: list[list[int]]


def _gf2_rank(rows) -> int:
    basis: list[int] = []
    for r in rows:
        v = int("".join(str(int(x) % 2) for x in r), 2) if len(r) else 0
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def z2_basis(tri: IdealTriangulation) -> Z2HomologyBasis:
    """``2g`` fundamental cycles of the dual graph independent modulo puncture links.

    The spanning tree is a breadth-first tree from triangle 0 exploring
    edges in increasing label order.
    """
    n = tri.n_edges
    ends = tri.edge_slots
    adj: dict[int, list[tuple[int, int]]] = {t: [] for t in range(tri.n_triangles)}
    for e, ((t0, _), (t1, _)) in ends.items():
        adj[t0].append((e, t1))
        adj[t1].append((e, t0))
    parent: dict[int, tuple[int, int] | None] = {0: None}
    tree = set()
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for e, w in sorted(adj[u]):
            if w not in parent:
                parent[w] = (u, e)
                tree.add(e)
                queue.append(w)

    def path_to_root(t):
        edges = []
        while parent[t] is not None:
            t, e = parent[t]
            edges.append(e)
        return edges

    K = puncture_matrix(tri)
    span = [K[v] % 2 for v in range(tri.punctures)]
    base_rank = _gf2_rank(span)
    vectors, cycles = [], []
    for e in sorted(set(ends) - tree):
        (t0, _), (t1, _) = ends[e]
        vec = np.zeros(n, dtype=np.int64)
        vec[e - 1] ^= 1
        for f in path_to_root(t0) + path_to_root(t1):
            vec[f - 1] ^= 1
        if _gf2_rank(span + vectors + [vec]) == base_rank + len(vectors) + 1:
            vectors.append(vec)
            cycles.append([int(f) for f in np.flatnonzero(vec) + 1])
        if len(vectors) == 2 * tri.genus:
            break
    if len(vectors) != 2 * tri.genus:
        raise NormalFormError("could not find 2g independent homology cycles")
    return Z2HomologyBasis(vectors, cycles)


def n_kernel_check(tri: IdealTriangulation, N: int, v) -> bool:
    """Whether ``sigma(v, .)`` vanishes modulo ``N``."""
    if N < 1:
        raise ValueError("N must be positive")
    v = as_int_matrix(np.asarray(v))
    S = as_int_matrix(sigma(tri))
    return all(int(x) % N == 0 for x in S.dot(v))


def n_kernel_span_check(tri: IdealTriangulation, N: int, v) -> bool:
    """Membership of ``v`` in the span of the kernel generators modulo ``N``.

    For even ``N`` the span also contains ``(N/2) l_k`` for the homology cycles.
    """
    gens = [np.asarray(g) for g in kernel_basis(tri).generators]
    if N % 2 == 0 and tri.genus > 0:
        gens += [(N // 2) * np.asarray(l) for l in z2_basis(tri).vectors]
    M = as_int_matrix(np.array(gens).T)
    return solve_mod(M, np.asarray(v), N) is not None
