"""Pleated-surface geometry of edge weights.

Points of the Riemann sphere are handled as homogeneous 2-vectors ``(z, 1)``
or ``(1, 0)`` for infinity, so ``z_a - z_b`` becomes ``det[a b]`` up to
factors that cancel in every cross ratio.

Edge weight convention: for slot ``a`` of a triangle, running from corner
``a-1`` to corner ``a``, put ``z_+`` at corner ``a``, ``z_-`` at corner
``a-1`` and ``z_r`` at the third corner; the triangle on the other side has
third vertex ``z_l`` and ``x = -(z_l-z_+)(z_r-z_-)/((z_l-z_-)(z_r-z_+))``.
"""

from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import spence

from .flipaction import Flip, MappingClass, apply_move, flip_weights, reindex_weights

from .triangulation import FlipCase, IdealTriangulation, classify_flip, dual_graph, puncture_matrix

POINT_TOL = 1e-12
SEED_TRIANGLE = (0.0, -1.0, complex("inf"))
VOLUME_TOL = 1e-6


class GeometryError(ArithmeticError):
    """Coincident vertices or zero weights."""


class NoFixedPointError(RuntimeError):
    pass


# -- projective points ----------------------------------------------------------------

def to_vec(z) -> np.ndarray:
    if isinstance(z, np.ndarray):
        return z.astype(complex)
    z = complex(z)
    if cmath.isinf(z):
        return np.array([1, 0], dtype=complex)
    return np.array([z, 1], dtype=complex)


def to_point(v: np.ndarray) -> complex:
    if abs(v[1]) <= POINT_TOL * abs(v[0]):
        return complex("inf")
    return complex(v[0] / v[1])


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _det(a: np.ndarray, b: np.ndarray) -> complex:
    return a[0] * b[1] - a[1] * b[0]


def _distinct(*vs: np.ndarray) -> bool:
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            scale = np.linalg.norm(vs[i]) * np.linalg.norm(vs[j])
            if abs(_det(vs[i], vs[j])) <= POINT_TOL * scale:
                return False
    return True


def cross_ratio(z_plus, z_minus, z_l, z_r) -> complex:
    p, m, l, r = (to_vec(z) for z in (z_plus, z_minus, z_l, z_r))
    if not _distinct(p, m, l, r):
        raise GeometryError("cross ratio of coincident points")
    return complex(-_det(l, p) * _det(r, m) / (_det(l, m) * _det(r, p)))


def fourth_vertex_vec(p: np.ndarray, m: np.ndarray, r: np.ndarray, x: complex) -> np.ndarray:
    if x == 0:
        raise GeometryError("zero weight")
    if not _distinct(p, m, r):
        raise GeometryError("coincident triangle vertices")
    # det(l, x det(r,+) z_- + det(r,-) z_+) = 0
    return _normalize(x * _det(r, p) * m + _det(r, m) * p)


def fourth_vertex(z_plus, z_minus, z_r, x) -> complex:
    """The ``z_l`` with ``cross_ratio(z_plus, z_minus, z_l, z_r) == x``."""
    return to_point(fourth_vertex_vec(to_vec(z_plus), to_vec(z_minus), to_vec(z_r), complex(x)))


# -- Mobius maps -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MobiusMap:
    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=complex)
        d = np.linalg.det(M)
        if abs(d) < 1e-300:
            raise GeometryError("singular Mobius matrix")
        object.__setattr__(self, "M", M / cmath.sqrt(d))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(np.eye(2))

    @classmethod
    def from_triples(cls, src: Sequence[np.ndarray], dst: Sequence[np.ndarray]) -> "MobiusMap":
        """The map sending each of three points ``src[k]`` to ``dst[k]``."""
        s = [to_vec(v) for v in src]
        d = [to_vec(v) for v in dst]
        if not (_distinct(*s) and _distinct(*d)):
            raise GeometryError("degenerate triple")
        # s2 = a s0 + b s1, d2 = c d0 + e d1
        a, b = np.linalg.solve(np.column_stack(s[:2]), s[2])
        c, e = np.linalg.solve(np.column_stack(d[:2]), d[2])
        D = np.column_stack([c / a * d[0], e / b * d[1]])
        return cls(D @ np.linalg.inv(np.column_stack(s[:2])))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap(self.M @ other.M)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(np.linalg.inv(self.M))

    def __call__(self, z):
        return to_point(self.M @ to_vec(z))

    @property
    def trace(self) -> complex:
        """Defined up to sign."""
        return complex(np.trace(self.M))

    @property
    def trace_sq(self) -> complex:
        return self.trace ** 2

    def close_to(self, other: "MobiusMap", tol: float = 1e-9) -> bool:
        return min(np.max(np.abs(self.M - other.M)), np.max(np.abs(self.M + other.M))) <= tol

    def is_parabolic(self, tol: float = 1e-8) -> bool:
        return abs(abs(self.trace) - 2) <= tol and not self.close_to(MobiusMap.identity(), tol)


# -- developing map ----------------------------------------------------------------

@dataclass(frozen=True)
class DevelopedTriangle:
    triangle: int
    vertices: tuple  # homogeneous vectors for corners 0, 1, 2
    crossings: tuple = ()

    @property
    def points(self) -> tuple[complex, complex, complex]:
        return tuple(to_point(v) for v in self.vertices)


def _as_step(tri: IdealTriangulation, t: int, item) -> int:
    """Slot of triangle ``t`` named by ``item``: an edge label or a ``(t, slot)`` pair."""
    if isinstance(item, tuple):
        tt, a = item
        if tt != t:
            raise GeometryError(f"path step {item} does not start in triangle {t}")
        return a % 3
    slots = [a for a in range(3) if tri.edge(t, a) == item]
    if not slots:
        raise GeometryError(f"edge {item} is not a side of triangle {t}")
    if len(slots) > 1:
        raise GeometryError(f"edge {item} appears twice in triangle {t}; give a (triangle, slot) pair")
    return slots[0]


def seed_vectors(seed=SEED_TRIANGLE) -> tuple:
    return tuple(_normalize(to_vec(z)) for z in seed)


def develop(tri: IdealTriangulation, x, path: Iterable = (), start: int = 0,
            seed=SEED_TRIANGLE) -> DevelopedTriangle:
    x = np.asarray(x, dtype=complex)
    if np.any(x == 0):
        raise GeometryError("weights must be nonzero")
    t, verts = start, list(seed_vectors(seed))
    crossed = []
    for item in path:
        a = _as_step(tri, t, item)
        e = tri.edge(t, a)
        z_plus, z_minus, z_r = verts[a], verts[(a - 1) % 3], verts[(a + 1) % 3]
        z_l = fourth_vertex_vec(z_plus, z_minus, z_r, x[e - 1])
        t2, b = tri.partner(t, a)
        new = [None, None, None]
        new[(b - 1) % 3], new[b], new[(b + 1) % 3] = z_plus, z_minus, z_l
        crossed.append((t, a))
        t, verts = t2, new
        if not _distinct(*verts):
            raise GeometryError("developed triangle degenerated")
    return DevelopedTriangle(t, tuple(verts), tuple(crossed))


def holonomy(tri: IdealTriangulation, x, loop: Iterable, start: int = 0) -> MobiusMap:
    end = develop(tri, x, loop, start)
    if end.triangle != start:
        raise GeometryError("path is not closed")
    return MobiusMap.from_triples(seed_vectors(), end.vertices)


def _tree_paths(tri: IdealTriangulation, root: int = 0) -> dict[int, list[tuple[int, int]]]:
    """Crossings from ``root`` to every triangle along a BFS spanning tree."""
    paths = {root: []}
    queue = deque([root])
    while queue:
        t = queue.popleft()
        for a in range(3):
            t2, _ = tri.partner(t, a)
            if t2 not in paths:
                paths[t2] = paths[t] + [(t, a)]
                queue.append(t2)
    return paths


def _reverse(tri: IdealTriangulation, path: list[tuple[int, int]]) -> list[tuple[int, int]]:
    return [tri.partner(t, a) for t, a in reversed(path)]


def generator_loops(tri: IdealTriangulation, root: int = 0) -> list[list[tuple[int, int]]]:
    """One closed path per dual edge outside a spanning tree: a free basis of the fundamental group."""
    paths = _tree_paths(tri, root)
    tree = set()
    for p in paths.values():
        if p:
            t, a = p[-1]
            tree.add(tri.edge(t, a))
    loops = []
    for e, ((t, a), (t2, _)) in tri.edge_slots.items():
        if e in tree:
            continue
        loops.append(paths[t] + [(t, a)] + _reverse(tri, paths[t2]))
    return loops


def puncture_loops(tri: IdealTriangulation, root: int = 0) -> list[list[tuple[int, int]]]:
    """Closed paths based at ``root`` turning once around each puncture."""
    paths = _tree_paths(tri, root)
    out = []
    for walk in dual_graph(tri).puncture_walks:
        t0 = walk[0][0]
        out.append(paths[t0] + list(walk) + _reverse(tri, paths[t0]))
    return out


@dataclass
class Holonomy:
    generators: list[MobiusMap]
    peripheral: list[MobiusMap]
    loops: list[list[tuple[int, int]]] = field(default_factory=list)

    def irreducible(self, tol: float = 1e-6) -> bool:
        """Some pair of generators has commutator trace away from 2."""
        g = self.generators
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                c = g[i] @ g[j] @ g[i].inverse() @ g[j].inverse()
                if abs(np.trace(c.M) - 2) > tol:
                    return True
        return False

    def short_words(self) -> list[MobiusMap]:
        g = self.generators
        out = list(g)
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                out += [g[i] @ g[j], g[i] @ g[j].inverse()]
        return out

    def has_elliptic(self, tol: float = 1e-8) -> bool:
        """Some generator or product of two has real trace strictly inside (-2, 2).

        A discrete faithful image of a free group has no such elements.
        """
        for h in self.short_words():
            t = h.trace
            if abs(t.imag) < tol and abs(t.real) < 2 - tol:
                return True
        return False


def holonomy_data(tri: IdealTriangulation, x) -> Holonomy:
    gl = generator_loops(tri)
    return Holonomy([holonomy(tri, x, p) for p in gl],
                    [holonomy(tri, x, p) for p in puncture_loops(tri)], gl)


def puncture_products(tri: IdealTriangulation, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    K = puncture_matrix(tri)
    return np.array([np.prod(x ** K[j]) for j in range(tri.punctures)])


# -- fixed points of mapping classes -----------------------------------------------

@dataclass
class FixedPoint:
    x: np.ndarray
    residual: float
    puncture_products: np.ndarray
    parabolic: bool
    isolated: bool
    product_one: bool
    irreducible: bool
    peripheral_trace_sq: list[complex]
    elliptic: bool = False
    volume: float = 0.0

    @property
    def preferred(self) -> bool:
        # real (Fuchsian) points have zero volume; periodic classes only have those
        return (self.parabolic and self.isolated and self.product_one and self.irreducible
                and not self.elliptic and self.volume > VOLUME_TOL)

    def to_json(self) -> dict:
        c = lambda z: [float(z.real), float(z.imag)]
        return {"x": [c(v) for v in self.x], "residual": self.residual,
                "puncture_products": [c(v) for v in self.puncture_products],
                "peripheral_trace_sq": [c(v) for v in self.peripheral_trace_sq],
                "parabolic": self.parabolic, "isolated": self.isolated,
                "product_one": self.product_one, "irreducible": self.irreducible, "elliptic": self.elliptic,
                "preferred": self.preferred, "volume": self.volume}


def _constraint_rows(tri: IdealTriangulation) -> np.ndarray:
    """Log-linear functions conserved by every flip: each puncture product and the total product."""
    return np.vstack([puncture_matrix(tri), np.ones(tri.n_edges, dtype=np.int64)]).astype(float)


def _residual(mc: MappingClass, x: np.ndarray, C: np.ndarray | None):
    y, J = mc.act_weights(x, jacobian=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.log(y / x)
    A = J - np.eye(len(x))
    if C is not None:
        r = np.concatenate([r, [cmath.log(np.prod(x ** row.astype(int))) for row in C]])
        A = np.vstack([A, C])
    return y, r, A


def _newton(mc: MappingClass, x0: np.ndarray, tol: float, max_iter: int, constrained: bool):
    """Damped Newton in log coordinates; with ``constrained`` the conserved products are pinned to 1."""
    C = _constraint_rows(mc.base) if constrained else None
    x = x0.astype(complex)
    size = lambda y, r: max(np.max(np.abs(y - x)), np.max(np.abs(r[len(x):]), initial=0.0))
    y, r, A = _residual(mc, x, C)
    res = size(y, r)
    for _ in range(max_iter):
        if res < tol:
            break
        step = np.linalg.lstsq(A, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-4:
            xn = x * np.exp(lam * step)
            try:
                yn, rn, An = _residual(mc, xn, C)
            except ArithmeticError:
                lam /= 2
                continue
            x_old, x = x, xn
            new = size(yn, rn) if np.all(np.isfinite(yn)) else np.inf
            if new < res:
                y, r, A, res = yn, rn, An, new
                break
            x = x_old
            lam /= 2
        else:
            break
    return x, float(np.max(np.abs(mc.act_weights(x) - x)))


def newton_seeds(n: int, count: int = 32, seed: int = 0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    half = count // 2
    for _ in range(half):
        noise = rng.normal(size=n) + 1j * rng.normal(size=n)
        out.append(np.ones(n) + 0.3 * noise / np.abs(noise))
    for _ in range(count - half):
        out.append(np.exp(1j * rng.uniform(-np.pi, np.pi, size=n)))
    return out


def _describe(mc: MappingClass, x: np.ndarray, residual: float, tol: float) -> FixedPoint:
    tri = mc.base
    _, J = mc.act_weights(x, jacobian=True)
    # isolated within its level set of the conserved products
    sv = np.linalg.svd(np.vstack([J - np.eye(len(x)), _constraint_rows(tri)]), compute_uv=False)
    isolated = bool(sv[-1] > 1e-8 * max(1.0, sv[0]))
    pp = puncture_products(tri, x)
    try:
        hol = holonomy_data(tri, x)
        irreducible, periph = hol.irreducible(), [h.trace_sq for h in hol.peripheral]
        elliptic = hol.has_elliptic()
    except GeometryError:
        irreducible, periph, elliptic = False, [complex("nan")] * tri.punctures, True
    try:
        vol = layered_volume(mc, x)
    except ArithmeticError:
        vol = float("nan")
    return FixedPoint(
        x=x, residual=residual, puncture_products=pp,
        parabolic=bool(np.all(np.abs(pp - 1) < tol)),
        isolated=isolated,
        product_one=bool(abs(np.prod(x) - 1) < tol),
        irreducible=irreducible,
        peripheral_trace_sq=periph,
        elliptic=elliptic,
        volume=vol,
    )


def fixed_point(mc: MappingClass, n_seeds: int = 32, seed: int = 0, tol: float = 1e-10,
                max_iter: int = 80, seeds: Sequence | None = None) -> list[FixedPoint]:
    """All distinct fixed points of the weight action reached from the seeds, preferred ones first."""
    n = mc.base.n_edges
    starts = list(seeds) if seeds is not None else newton_seeds(n, n_seeds, seed)
    found: list[tuple[np.ndarray, float]] = []
    runs = [(x0, c) for x0 in starts for c in (False, True)]

    def add(x, res):
        if not np.all(np.isfinite(x)) or res >= tol:
            return
        if any(np.max(np.abs(x - y)) < 1e-6 * max(1.0, np.max(np.abs(y))) for y, _ in found):
            return
        found.append((x, res))

    for x0, constrained in runs:
        try:
            x, res = _newton(mc, np.asarray(x0, dtype=complex), tol * 1e-2, max_iter, constrained)
        except (ArithmeticError, np.linalg.LinAlgError):
            continue
        add(x, res)
    # the action has real coefficients, so complex conjugation permutes fixed points
    for x, _ in list(found):
        try:
            add(x.conj(), float(np.max(np.abs(mc.act_weights(x.conj()) - x.conj()))))
        except ArithmeticError:
            pass
    if not found:
        raise NoFixedPointError("Newton iteration did not converge from any seed")
    points = [_describe(mc, x, r, 1e-8) for x, r in found]
    key = lambda fp: (not fp.preferred, -round(np.nan_to_num(fp.volume, nan=-np.inf), 8),
                      tuple(np.round(np.concatenate([fp.x.real, fp.x.imag]), 8)))
    return sorted(points, key=key)


def geometric_fixed_point(mc: MappingClass, **kw) -> FixedPoint:
    """Preferred fixed point of largest layered volume: parabolic punctures, isolated, total product 1,
    irreducible holonomy without elliptic short words, positive volume."""
    for fp in fixed_point(mc, **kw):
        if fp.preferred:
            return fp
    raise NoFixedPointError("no isolated parabolic fixed point with irreducible holonomy")


def bloch_wigner(z: complex) -> float:
    """``Im Li2(z) + arg(1 - z) log|z|``: the volume of the ideal tetrahedron of shape ``z``."""
    if z == 0 or z == 1:
        return 0.0
    li2 = complex(spence(1 - complex(z)))
    return li2.imag + cmath.phase(1 - z) * np.log(abs(z))


def layered_volume(mc: MappingClass, x) -> float:
    """Sum of signed tetrahedron volumes ``D(-x_i)`` over the flips of ``mc`` started at ``x``.

    A flip followed by its undo contributes zero, so conjugated presentations agree.
    """
    tri, x = mc.base, np.asarray(x, dtype=complex)
    vol = 0.0
    for mv in mc.moves:
        if isinstance(mv, Flip):
            if classify_flip(tri, mv.edge).case is not FlipCase.SELF_ADJACENT:
                vol += bloch_wigner(-x[mv.edge - 1])
                x = flip_weights(tri, x, mv.edge)
        else:
            x = reindex_weights(x, mv.perm)
        tri = apply_move(tri, mv)
    return float(vol)


def eisenstein_distance(z: complex) -> float:
    """Distance from ``z`` to the nearest integer combination of 1 and a primitive cube root of unity."""
    w = cmath.exp(2j * cmath.pi / 3)
    b = z.imag / w.imag
    best = float("inf")
    for bb in (np.floor(b), np.ceil(b)):
        a = z.real - bb * w.real
        for aa in (np.floor(a), np.ceil(a)):
            best = min(best, abs(z - (aa + bb * w)))
    return best
