"""Combinatorial ideal triangulations of punctured oriented surfaces.

A triangulation is a list of triangles, each an ordered triple of edge
labels ``1..n`` read counterclockwise.  Every label occurs in exactly two
slots; since all triangles are counterclockwise the gluing of the two
occurrences is forced to be orientation reversing, so no extra data is
needed.

Slots and corners are addressed by pairs ``(t, a)`` with ``t`` a triangle
index and ``a`` in ``{0, 1, 2}``.  Slot ``a`` of a triangle runs from corner
``a - 1`` to corner ``a``; corner ``a`` sits between slot ``a`` and slot
``a + 1``.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class TriangulationError(ValueError):
    """Raised for data that does not describe a valid ideal triangulation."""


class SelfAdjacentFlipWarning(UserWarning):
    pass


class FlipCase(enum.Enum):
    EMBEDDED = "1"
    CASE2 = "2"
    CASE2P = "2'"
    CASE3 = "3"
    CASE3P = "3'"
    CASE4 = "4"
    CASE5 = "5"
    CASE5P = "5'"
    SELF_ADJACENT = "self-adjacent"


@dataclass(frozen=True)
class FlipSquare:
    """The square around edge ``i`` with sides ``j, k, l, m`` counterclockwise.

    The diagonal ``i`` runs from the ``jk`` corner to the ``lm`` corner.
    ``first`` is the triangle with sides ``(i, k, l)`` and ``second`` the one
    with sides ``(i, m, j)``.
    """

    case: FlipCase
    i: int
    j: int = 0
    k: int = 0
    l: int = 0
    m: int = 0
    first: int = -1
    second: int = -1

    @property
    def sides(self) -> dict[str, int]:
        return {"j": self.j, "k": self.k, "l": self.l, "m": self.m}


def _min_rotation(tri: tuple[int, int, int]) -> tuple[int, int, int]:
    return min(tri[a:] + tri[:a] for a in range(3))


@dataclass(frozen=True, eq=False)
class IdealTriangulation:
    genus: int
    punctures: int
    triangles: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        tris = tuple(tuple(int(e) for e in t) for t in self.triangles)
        object.__setattr__(self, "triangles", tris)
        validate(self)

    # -- basic counts ---------------------------------------------------
    @property
    def n_edges(self) -> int:
        return 6 * self.genus + 3 * self.punctures - 6

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edge(self, t: int, a: int) -> int:
        return self.triangles[t][a % 3]

    @cached_property
    def edge_slots(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        slots: dict[int, list[tuple[int, int]]] = {}
        for t, tri in enumerate(self.triangles):
            for a, e in enumerate(tri):
                slots.setdefault(e, []).append((t, a))
        return {e: (s[0], s[1]) for e, s in sorted(slots.items())}

    def partner(self, t: int, a: int) -> tuple[int, int]:
        """The slot glued to slot ``(t, a)``."""
        s0, s1 = self.edge_slots[self.edge(t, a)]
        return s1 if s0 == (t, a % 3) else s0

    # -- punctures --------------------------------------------------------
    @cached_property
    def _corner_cycles(self) -> list[list[tuple[int, int]]]:
        return _corner_cycles(self.triangles, self.edge_slots)

    @cached_property
    def corner_class(self) -> dict[tuple[int, int], int]:
        return {c: v for v, cyc in enumerate(self._corner_cycles) for c in cyc}

    def puncture_corners(self, v: int) -> list[tuple[int, int]]:
        """Corners at puncture ``v`` in counterclockwise order around it."""
        return list(self._corner_cycles[v])

    # -- equality up to rotation of triangles and their order -------------
    @cached_property
    def canonical(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(sorted(_min_rotation(t) for t in self.triangles))

    def __eq__(self, other):
        if not isinstance(other, IdealTriangulation):
            return NotImplemented
        return (self.genus, self.punctures, self.canonical) == (
            other.genus, other.punctures, other.canonical)

    def __hash__(self):
        return hash((self.genus, self.punctures, self.canonical))

    def __repr__(self):
        return (f"IdealTriangulation(genus={self.genus}, punctures={self.punctures}, "
                f"triangles={list(self.triangles)})")

    # -- convenience wrappers ----------------------------------------------
    def sigma(self) -> np.ndarray:
        return sigma(self)

    def puncture_matrix(self) -> np.ndarray:
        return puncture_matrix(self)

    def flip(self, i: int) -> "IdealTriangulation":
        return flip(self, i)

    def reindex(self, perm) -> "IdealTriangulation":
        return reindex(self, perm)

    def to_text(self) -> str:
        lines = [f"genus {self.genus} punctures {self.punctures}"]
        lines += [" ".join(str(e) for e in t) for t in self.triangles]
        return "\n".join(lines) + "\n"


def _corner_cycles(triangles, edge_slots) -> list[list[tuple[int, int]]]:
    def partner(t, a):
        s0, s1 = edge_slots[triangles[t][a]]
        return s1 if s0 == (t, a) else s0

    seen = set()
    cycles = []
    for t in range(len(triangles)):
        for a in range(3):
            if (t, a) in seen:
                continue
            cyc = []
            c = (t, a)
            while c not in seen:
                seen.add(c)
                cyc.append(c)
                # rotate around the vertex by crossing slot a + 1
                c = partner(c[0], (c[1] + 1) % 3)
            cycles.append(cyc)
    return cycles


def validate(tri: IdealTriangulation) -> None:
    """Check every structural constraint; raise ``TriangulationError`` otherwise."""
    g, p = tri.genus, tri.punctures
    if g < 0:
        raise TriangulationError(f"genus must be non-negative, got {g}")
    if p < 1:
        raise TriangulationError(f"at least one puncture required, got {p}")
    if g == 0 and p < 3:
        raise TriangulationError("p >= 3 required when g = 0")
    n = 6 * g + 3 * p - 6
    t_expected = 4 * g + 2 * p - 4
    if len(tri.triangles) != t_expected:
        raise TriangulationError(
            f"expected {t_expected} triangles for genus {g} with {p} punctures, "
            f"got {len(tri.triangles)}")
    counts: dict[int, list[tuple[int, int]]] = {}
    for t, tr in enumerate(tri.triangles):
        if len(tr) != 3:
            raise TriangulationError(f"triangle {t} does not have three slots: {tr}")
        for a, e in enumerate(tr):
            if not 1 <= e <= n:
                raise TriangulationError(
                    f"edge index {e} in slot ({t}, {a}) outside 1..{n}")
            counts.setdefault(e, []).append((t, a))
    for e in range(1, n + 1):
        occ = counts.get(e, [])
        if len(occ) != 2:
            raise TriangulationError(
                f"edge {e} occurs {len(occ)} times (slots {occ}), expected exactly 2")
    edge_slots = {e: (s[0], s[1]) for e, s in counts.items()}
    cycles = _corner_cycles(tri.triangles, edge_slots)
    if len(cycles) != p:
        raise TriangulationError(
            f"gluing produces {len(cycles)} vertex classes, expected {p} punctures")
    if p - n + len(tri.triangles) != 2 - 2 * g:
        raise TriangulationError("Euler characteristic mismatch")
    # connectivity of the dual graph
    adj: dict[int, set[int]] = {t: set() for t in range(len(tri.triangles))}
    for (t0, _), (t1, _) in edge_slots.values():
        adj[t0].add(t1)
        adj[t1].add(t0)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u] - seen:
            seen.add(w)
            queue.append(w)
    if len(seen) != len(tri.triangles):
        raise TriangulationError("triangulated surface is not connected")


def sigma(tri: IdealTriangulation) -> np.ndarray:
    """The antisymmetric spike-count matrix, indexed ``[i-1, j-1]``.

    At corner ``a`` (between slots ``a`` and ``a+1``) the spike has
    ``edge(a+1)`` on its left and ``edge(a)`` on its right.
    """
    n = tri.n_edges
    a = np.zeros((n, n), dtype=np.int64)
    for tr in tri.triangles:
        for s in range(3):
            right, left = tr[s], tr[(s + 1) % 3]
            a[left - 1, right - 1] += 1
    return a - a.T


def puncture_matrix(tri: IdealTriangulation) -> np.ndarray:
    """``K[v, j-1]`` = number of ends of edge ``j`` converging to puncture ``v``."""
    K = np.zeros((tri.punctures, tri.n_edges), dtype=np.int64)
    cls = tri.corner_class
    for e, ((t, a), _) in tri.edge_slots.items():
        K[cls[(t, (a - 1) % 3)], e - 1] += 1
        K[cls[(t, a)], e - 1] += 1
    return K


def classify_flip(tri: IdealTriangulation, i: int) -> FlipSquare:
    (t0, a0), (t1, a1) = tri.edge_slots[i]
    if t0 == t1:
        return FlipSquare(FlipCase.SELF_ADJACENT, i, first=t0, second=t1)
    x0, y0 = tri.edge(t0, a0 + 1), tri.edge(t0, a0 + 2)
    x1, y1 = tri.edge(t1, a1 + 1), tri.edge(t1, a1 + 2)
    # the two labelings are related by the half turn of the square
    first, second = t0, t1
    j, k, l, m = y1, x0, y0, x1
    if (l == m and j != k) or (k == l and j != m):
        first, second = t1, t0
        j, k, l, m = y0, x1, y1, x0
    jl, km, jk, lm, jm, kl = j == l, k == m, j == k, l == m, j == m, k == l
    if jl and km:
        case = FlipCase.CASE4
    elif jk and lm:
        case = FlipCase.CASE5
    elif jm and kl:
        case = FlipCase.CASE5P
    elif jl:
        case = FlipCase.CASE2
    elif km:
        case = FlipCase.CASE2P
    elif jk:
        case = FlipCase.CASE3
    elif jm:
        case = FlipCase.CASE3P
    else:
        case = FlipCase.EMBEDDED
    return FlipSquare(case, i, j, k, l, m, first, second)


def flip(tri: IdealTriangulation, i: int) -> IdealTriangulation:
    """Replace edge ``i`` by the other diagonal of its square.

    A self-adjacent edge is left alone (with a ``SelfAdjacentFlipWarning``).
    """
    sq = classify_flip(tri, i)
    if sq.case is FlipCase.SELF_ADJACENT:
        warnings.warn(f"edge {i} is self-adjacent; flip leaves the triangulation unchanged",
                      SelfAdjacentFlipWarning, stacklevel=2)
        return tri
    tris = list(tri.triangles)
    tris[sq.first] = (sq.k, i, sq.j)
    tris[sq.second] = (sq.l, sq.m, i)
    return IdealTriangulation(tri.genus, tri.punctures, tuple(tris))


def _check_perm(perm, n: int) -> tuple[int, ...]:
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise TriangulationError(f"{perm} is not a permutation of 1..{n}")
    return perm


def reindex(tri: IdealTriangulation, perm) -> IdealTriangulation:
    """Relabel so that edge ``i`` of the result is edge ``perm[i-1]`` of ``tri``."""
    perm = _check_perm(perm, tri.n_edges)
    inv = {old: new for new, old in enumerate(perm, start=1)}
    tris = tuple(tuple(inv[e] for e in t) for t in tri.triangles)
    return IdealTriangulation(tri.genus, tri.punctures, tris)


def invert_perm(perm) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm, start=1):
        inv[v - 1] = i
    return tuple(inv)


def find_relabelings(src: IdealTriangulation, dst: IdealTriangulation) -> list[tuple[int, ...]]:
    """All ``perm`` with ``reindex(src, perm) == dst``.

    Found by anchoring triangle 0 of ``dst`` on every rotated triangle of
    ``src`` and propagating through the gluing.
    """
    if (src.genus, src.punctures) != (dst.genus, dst.punctures):
        return []
    found = set()
    for t_src, rot in itertools.product(range(src.n_triangles), range(3)):
        tmap = {0: (t_src, rot)}  # dst triangle -> (src triangle, rotation)
        emap: dict[int, int] = {}  # dst edge -> src edge
        queue = deque([0])
        ok = True
        while queue and ok:
            u = queue.popleft()
            su, r = tmap[u]
            for a in range(3):
                de, se = dst.edge(u, a), src.edge(su, a + r)
                if emap.setdefault(de, se) != se:
                    ok = False
                    break
                w, b = dst.partner(u, a)
                sw, sb = src.partner(su, (a + r) % 3)
                want = (sw, (sb - b) % 3)
                if w in tmap:
                    if tmap[w] != want:
                        ok = False
                        break
                else:
                    tmap[w] = want
                    queue.append(w)
        if ok and len(emap) == dst.n_edges and len(set(emap.values())) == dst.n_edges:
            perm = tuple(emap[i] for i in range(1, dst.n_edges + 1))
            if reindex(src, perm) == dst:
                found.add(perm)
    return sorted(found)


@dataclass(frozen=True)
class DualGraph:
    """Trivalent graph dual to a triangulation.

    ``ends[e]`` holds the two slots of edge ``e``.  ``puncture_walks[v]`` is
    the cyclic list of slots crossed while turning counterclockwise around
    puncture ``v``; ``puncture_edges[v]`` lists the corresponding edge labels.
    """

    n_vertices: int
    ends: dict[int, tuple[tuple[int, int], tuple[int, int]]]
    puncture_walks: list[list[tuple[int, int]]] = field(default_factory=list)
    puncture_edges: list[list[int]] = field(default_factory=list)

    def degree(self, t: int) -> int:
        return sum((s0[0] == t) + (s1[0] == t) for s0, s1 in self.ends.values())

    def neighbours(self, t: int) -> list[tuple[int, int, int]]:
        """``(edge, other_triangle, slot_in_t)`` for each of the three slots of ``t``."""
        out = []
        for e, (s0, s1) in self.ends.items():
            if s0[0] == t:
                out.append((e, s1[0], s0[1]))
            if s1[0] == t:
                out.append((e, s0[0], s1[1]))
        return sorted(out, key=lambda x: x[2])


def dual_graph(tri: IdealTriangulation) -> DualGraph:
    walks, edges = [], []
    for v in range(tri.punctures):
        walk = [(t, (a + 1) % 3) for t, a in tri.puncture_corners(v)]
        walks.append(walk)
        edges.append([tri.edge(t, a) for t, a in walk])
    return DualGraph(tri.n_triangles, dict(tri.edge_slots), walks, edges)


# -- parsing -------------------------------------------------------------------

def parse_triangulation(text: str) -> IdealTriangulation:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if header is None:
            if len(words) != 4 or words[0] != "genus" or words[2] != "punctures":
                raise TriangulationError(
                    f"line {lineno}: expected 'genus G punctures P', got {raw!r}")
            try:
                header = (int(words[1]), int(words[3]))
            except ValueError:
                raise TriangulationError(f"line {lineno}: non-integer header {raw!r}") from None
            continue
        if len(words) != 3:
            raise TriangulationError(f"line {lineno}: expected three edge indices, got {raw!r}")
        try:
            rows.append(tuple(int(w) for w in words))
        except ValueError:
            raise TriangulationError(f"line {lineno}: non-integer edge index in {raw!r}") from None
    if header is None:
        raise TriangulationError("empty triangulation file")
    return IdealTriangulation(header[0], header[1], tuple(rows))


# -- standard examples -----------------------------------------------------------

def punctured_torus() -> IdealTriangulation:
    return IdealTriangulation(1, 1, ((1, 2, 3), (1, 2, 3)))


def three_punctured_sphere() -> IdealTriangulation:
    return IdealTriangulation(0, 3, ((1, 2, 3), (1, 3, 2)))


def _from_faces(genus, punctures, faces, labels) -> IdealTriangulation:
    def e(u, v):
        return labels[frozenset((u, v))]
    tris = tuple((e(u, v), e(v, w), e(w, u)) for u, v, w in faces)
    return IdealTriangulation(genus, punctures, tris)


def four_punctured_sphere() -> IdealTriangulation:
    """Boundary of a tetrahedron, faces oriented by the outward normal."""
    faces = [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)]
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    labels = {frozenset(p): i for i, p in enumerate(pairs, start=1)}
    return _from_faces(0, 4, faces, labels)


def five_punctured_sphere() -> IdealTriangulation:
    """Two pentagons glued along their boundary; top fan from 0, bottom from 2."""
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (4, 3, 2), (0, 4, 2), (1, 0, 2)]
    tris = []
    boundary = {frozenset((a, (a + 1) % 5)): a + 1 for a in range(5)}
    top = {frozenset((0, 2)): 6, frozenset((0, 3)): 7}
    bottom = {frozenset((2, 4)): 8, frozenset((2, 0)): 9}
    for idx, (u, v, w) in enumerate(faces):
        lab = {**boundary, **(top if idx < 3 else bottom)}
        tris.append((lab[frozenset((u, v))], lab[frozenset((v, w))], lab[frozenset((w, u))]))
    return IdealTriangulation(0, 5, tuple(tris))


def genus2_one_puncture() -> IdealTriangulation:
    """Fan triangulation of the octagon with side word a b a' b' c d c' d'."""
    side = [1, 2, 1, 2, 3, 4, 3, 4]
    diag = {1: side[0], 7: side[7]}
    diag.update({i: 3 + i for i in range(2, 7)})  # internal diagonals 5..9
    tris = tuple((diag[i], side[i], diag[i + 1]) for i in range(1, 7))
    return IdealTriangulation(2, 1, tris)


def add_puncture(tri: IdealTriangulation, t: int) -> IdealTriangulation:
    """Insert a new puncture inside triangle ``t`` (three new edges)."""
    a, b, c = tri.triangles[t]
    n = tri.n_edges
    u0, u1, u2 = n + 1, n + 2, n + 3
    tris = list(tri.triangles)
    tris[t] = (a, u0, u2)
    tris += [(b, u1, u0), (c, u2, u1)]
    return IdealTriangulation(tri.genus, tri.punctures + 1, tuple(tris))


def standard_triangulation(genus: int, punctures: int) -> IdealTriangulation:
    if genus == 0:
        if punctures < 3:
            raise TriangulationError("p >= 3 required when g = 0")
        tri = three_punctured_sphere()
        have = 3
    elif genus == 1:
        tri, have = punctured_torus(), 1
    elif genus == 2:
        tri, have = genus2_one_puncture(), 1
    else:
        raise TriangulationError(f"no built-in triangulation for genus {genus}")
    while have < punctures:
        tri = add_puncture(tri, 0)
        have += 1
    return tri


def random_triangulation(genus: int, punctures: int, rng=None, n_flips: int = 40,
                         relabel: bool = True) -> IdealTriangulation:
    """Standard triangulation scrambled by random flips and a random relabeling."""
    rng = np.random.default_rng(rng)
    tri = standard_triangulation(genus, punctures)
    done = 0
    while done < n_flips:
        i = int(rng.integers(1, tri.n_edges + 1))
        if classify_flip(tri, i).case is FlipCase.SELF_ADJACENT:
            continue
        tri = flip(tri, i)
        done += 1
    if relabel:
        tri = reindex(tri, [int(v) + 1 for v in rng.permutation(tri.n_edges)])
    return tri
