"""Coordinate changes under diagonal exchanges and edge relabelings.

A flip at edge ``i`` turns ``X_i`` into its inverse and multiplies each side
edge ``X_h`` on the left by a product of factors ``(1 + q^e X_i^s)^pow``
(or a plain power of ``X_i`` when the side edge is glued to itself).  The
table below is keyed by the role of the side edge in the flip square.
Squares whose labels only fit the table after flipping are handled by
running the table backwards from the flipped triangulation.

The same formulas at ``q = 1`` act on edge weights.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .cfalgebra import q_power
from .repbuild import Representation
from .triangulation import (
    FlipCase,
    FlipSquare,
    IdealTriangulation,
    SelfAdjacentFlipWarning,
    TriangulationError,
    classify_flip,
    flip,
    invert_perm,
    reindex,
)

COND_LIMIT = 1e12
DEGENERACY_TOL = 1e-12


class DegenerateFlipError(ArithmeticError):
    """The flipped edge has weight -1, so the new coordinates are undefined."""


class NumericalDegeneracyError(ArithmeticError):
    """A factor matrix is too ill-conditioned to invert reliably."""


# (sign of exponent, q-exponent, power) per factor; an int stands for X_i^pow.
# The q-exponents are negative because s_ij counts left-minus-right spikes.
Factor = Union[tuple[int, int, int], int]

_TABLE: dict[FlipCase, dict[str, list[Factor]]] = {
    FlipCase.EMBEDDED: {"j": [(1, -1, 1)], "k": [(-1, -1, -1)], "l": [(1, -1, 1)], "m": [(-1, -1, -1)]},
    FlipCase.CASE2: {"j": [(1, -1, 1), (1, -3, 1)], "k": [(-1, -1, -1)], "m": [(-1, -1, -1)]},
    FlipCase.CASE3: {"j": [1], "l": [(1, -1, 1)], "m": [(-1, -1, -1)]},
    FlipCase.CASE4: {"j": [(1, -1, 1), (1, -3, 1)], "k": [(-1, -1, -1), (-1, -3, -1)]},
    FlipCase.CASE5: {"j": [1], "l": [1]},
}
_PRIMED = {FlipCase.CASE2P: FlipCase.CASE2, FlipCase.CASE3P: FlipCase.CASE3,
           FlipCase.CASE5P: FlipCase.CASE5}


def factor_table(case: FlipCase) -> dict[str, list[Factor]]:
    return _TABLE[case]


def _roles(sq: FlipSquare) -> dict[str, int]:
    return {"j": sq.j, "k": sq.k, "l": sq.l, "m": sq.m}


def _plan(tri: IdealTriangulation, i: int):
    """``(square, new_tri, forward, edges_to_factors)`` or ``None`` when self-adjacent."""
    sq = classify_flip(tri, i)
    if sq.case is FlipCase.SELF_ADJACENT:
        return None
    new = flip(tri, i)
    if sq.case in _TABLE:
        roles, table, forward = _roles(sq), _TABLE[sq.case], True
    else:
        back = classify_flip(new, i)
        if back.case is not _PRIMED[sq.case]:
            raise TriangulationError(f"unexpected reverse case {back.case} for {sq.case}")
        roles, table, forward = _roles(back), _TABLE[back.case], False
    return sq, new, forward, {roles[r]: fs for r, fs in table.items()}


def _warn_self_adjacent(i: int):
    warnings.warn(f"edge {i} borders a single triangle; flip left unchanged",
                  SelfAdjacentFlipWarning, stacklevel=3)


# -- edge weights --------------------------------------------------------------------

def _scalar_factor(fs: list[Factor], x: complex) -> complex:
    out = 1.0 + 0j
    for f in fs:
        if isinstance(f, int):
            out *= x ** f
        else:
            s, _, p = f
            out *= (1 + x ** s) ** p
    return out


def _log_derivative(fs: list[Factor], x: complex) -> complex:
    """``x d/dx log F(x)``."""
    out = 0j
    for f in fs:
        if isinstance(f, int):
            out += f
        else:
            s, _, p = f
            out += p * s * x ** s / (1 + x ** s)
    return out


def _check_weight(x: complex, i: int):
    if abs(1 + x) <= DEGENERACY_TOL * max(1.0, abs(x)):
        raise DegenerateFlipError(f"weight of edge {i} is -1")


def flip_weights(tri: IdealTriangulation, x, i: int, jacobian: bool = False):
    """Weights after flipping edge ``i``; optionally the log-coordinate Jacobian."""
    x = np.asarray(x, dtype=complex)
    plan = _plan(tri, i)
    n = tri.n_edges
    if plan is None:
        _warn_self_adjacent(i)
        return (x.copy(), np.eye(n, dtype=complex)) if jacobian else x.copy()
    _, _, forward, factors = plan
    xi = x[i - 1]
    _check_weight(xi, i)
    y = x.copy()
    y[i - 1] = 1 / xi
    J = np.eye(n, dtype=complex)
    J[i - 1, i - 1] = -1
    for h, fs in factors.items():
        if forward:
            y[h - 1] = _scalar_factor(fs, xi) * x[h - 1]
            J[h - 1, i - 1] += _log_derivative(fs, xi)
        else:
            y[h - 1] = x[h - 1] / _scalar_factor(fs, 1 / xi)
            J[h - 1, i - 1] += _log_derivative(fs, 1 / xi)
    return (y, J) if jacobian else y


# -- representations -----------------------------------------------------------------

def _matrix_factor(fs: list[Factor], X: np.ndarray, Xinv: np.ndarray, N: int):
    """``F(X)`` and its inverse for a factor list."""
    d = X.shape[0]
    I = np.eye(d, dtype=complex)
    F, Finv = I.copy(), I.copy()
    for f in fs:
        if isinstance(f, int):
            P, Pinv = (X, Xinv) if f > 0 else (Xinv, X)
            P, Pinv = np.linalg.matrix_power(P, abs(f)), np.linalg.matrix_power(Pinv, abs(f))
        else:
            s, e, p = f
            B = I + q_power(N, e) * (X if s > 0 else Xinv)
            if np.linalg.cond(B) > COND_LIMIT:
                raise NumericalDegeneracyError("flip factor is numerically singular")
            Binv = np.linalg.inv(B)
            P, Pinv = (B, Binv) if p > 0 else (Binv, B)
        F, Finv = F @ P, Pinv @ Finv
    return F, Finv


def flip_rep(rep: Representation, i: int) -> Representation:
    """The representation of the flipped algebra obtained by composing with the coordinate change."""
    plan = _plan(rep.tri, i)
    if plan is None:
        _warn_self_adjacent(i)
        return rep
    _, new_tri, forward, factors = plan
    X, Xinv = rep.mats[i - 1], rep.invs[i - 1]
    x = rep.scalar_of(np.linalg.matrix_power(X, rep.N), tol=1e-6)
    _check_weight(x, i)
    mats, invs = list(rep.mats), list(rep.invs)
    mats[i - 1], invs[i - 1] = Xinv, X
    for h, fs in factors.items():
        if forward:
            F, Finv = _matrix_factor(fs, X, Xinv, rep.N)
        else:
            Finv, F = _matrix_factor(fs, Xinv, X, rep.N)
        mats[h - 1] = F @ rep.mats[h - 1]
        invs[h - 1] = rep.invs[h - 1] @ Finv
    return Representation(new_tri, rep.N, tuple(mats), tuple(invs))


def reindex_rep(rep: Representation, perm) -> Representation:
    """Edge ``i`` of the result is edge ``perm[i-1]`` of ``rep``."""
    tri = reindex(rep.tri, perm)
    return Representation(tri, rep.N, tuple(rep.mats[p - 1] for p in perm),
                          tuple(rep.invs[p - 1] for p in perm))


def reindex_weights(x, perm) -> np.ndarray:
    x = np.asarray(x)
    return np.array([x[p - 1] for p in perm])


# -- move sequences ------------------------------------------------------------------

@dataclass(frozen=True)
class Flip:
    edge: int

    def __str__(self):
        return f"flip {self.edge}"


@dataclass(frozen=True)
class Reindex:
    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))

    def __str__(self):
        return "perm " + " ".join(map(str, self.perm))


Move = Union[Flip, Reindex]


def apply_move(tri: IdealTriangulation, move: Move) -> IdealTriangulation:
    if isinstance(move, Flip):
        if classify_flip(tri, move.edge).case is FlipCase.SELF_ADJACENT:
            return tri
        return flip(tri, move.edge)
    return reindex(tri, move.perm)


def trajectory(tri: IdealTriangulation, moves: Sequence[Move]) -> list[IdealTriangulation]:
    out = [tri]
    for mv in moves:
        out.append(apply_move(out[-1], mv))
    return out


def push_weights(tri: IdealTriangulation, x, moves: Sequence[Move], jacobian: bool = False):
    """Weights transported along ``moves``; returns ``(x', triangulations[, J])``."""
    x = np.asarray(x, dtype=complex)
    tris = [tri]
    J = np.eye(tri.n_edges, dtype=complex)
    for mv in moves:
        cur = tris[-1]
        if isinstance(mv, Flip):
            x, Jm = flip_weights(cur, x, mv.edge, jacobian=True)
            J = Jm @ J
        else:
            P = np.zeros((cur.n_edges, cur.n_edges))
            for a, p in enumerate(mv.perm):
                P[a, p - 1] = 1
            x, J = reindex_weights(x, mv.perm), P @ J
        tris.append(apply_move(cur, mv))
    return (x, tris, J) if jacobian else (x, tris)


def push_rep(rep: Representation, moves: Sequence[Move]):
    """Representation transported along ``moves``; returns ``(rep', triangulations)``."""
    tris = [rep.tri]
    for mv in moves:
        rep = flip_rep(rep, mv.edge) if isinstance(mv, Flip) else reindex_rep(rep, mv.perm)
        tris.append(rep.tri)
    return rep, tris


def push(obj, moves: Sequence[Move], x=None):
    """Dispatch: a ``Representation``, or a triangulation together with weights ``x``."""
    if isinstance(obj, Representation):
        return push_rep(obj, moves)
    if x is None:
        raise TypeError("weights are required when pushing a triangulation")
    return push_weights(obj, x, moves)


_MOVE_RE = re.compile(r"^\s*(flip|perm)\b(.*)$")


def parse_moves(text: str) -> list[Move]:
    """One move per line: ``flip I`` or ``perm i1 ... in``; ``#`` starts a comment."""
    moves: list[Move] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _MOVE_RE.match(line)
        if not m:
            raise TriangulationError(f"line {lineno}: expected 'flip' or 'perm', got {line!r}")
        try:
            args = [int(t) for t in m.group(2).split()]
        except ValueError:
            raise TriangulationError(f"line {lineno}: non-integer argument") from None
        if m.group(1) == "flip":
            if len(args) != 1:
                raise TriangulationError(f"line {lineno}: flip takes one edge")
            moves.append(Flip(args[0]))
        else:
            moves.append(Reindex(tuple(args)))
    return moves


def format_moves(moves: Sequence[Move]) -> str:
    return "".join(f"{m}\n" for m in moves)


def inverse_moves(tri: IdealTriangulation, moves: Sequence[Move]) -> list[Move]:
    """Moves undoing ``moves`` when started from their endpoint."""
    tris = trajectory(tri, moves)
    out: list[Move] = []
    for mv, before in zip(reversed(moves), reversed(tris[:-1])):
        if isinstance(mv, Reindex):
            out.append(Reindex(invert_perm(mv.perm)))
        elif classify_flip(before, mv.edge).case is not FlipCase.SELF_ADJACENT:
            out.append(Flip(mv.edge))
    return out


@dataclass(frozen=True)
class MappingClass:
    """A closed move sequence: the moves carry ``base`` back to itself, labels included."""

    base: IdealTriangulation
    moves: tuple

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        end = trajectory(self.base, self.moves)[-1]
        if end.canonical != self.base.canonical:
            raise TriangulationError("moves do not return to the base triangulation")

    def inverse(self) -> "MappingClass":
        return MappingClass(self.base, tuple(inverse_moves(self.base, self.moves)))

    def compose(self, other: "MappingClass") -> "MappingClass":
        """Apply ``self`` first, then ``other``."""
        if other.base != self.base:
            raise TriangulationError("mapping classes have different bases")
        return MappingClass(self.base, self.moves + other.moves)

    def conjugate(self, prefix: Sequence[Move]) -> "MappingClass":
        """The same class seen from the endpoint of ``prefix``."""
        back = inverse_moves(self.base, prefix)
        start = trajectory(self.base, prefix)[-1]
        return MappingClass(start, tuple(back) + self.moves + tuple(prefix))

    def act_weights(self, x, jacobian: bool = False):
        res = push_weights(self.base, x, self.moves, jacobian)
        return (res[0], res[2]) if jacobian else res[0]

    def act_rep(self, rep: Representation) -> Representation:
        return push_rep(rep, self.moves)[0]

    def to_text(self) -> str:
        return format_moves(self.moves)
