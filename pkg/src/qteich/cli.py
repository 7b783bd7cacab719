"""Command-line front end.

Every subcommand writes one JSON document (to ``--out`` or stdout).
Complex numbers are ``[re, im]`` pairs and matrices are row-major lists.
Exit status: 0 success, 2 parse or usage error, 3 domain error, 4 numerical failure.
``QTEICH_TOL`` overrides the fixed-point residual tolerance.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import flipaction, hypshadow, invariant, repbuild, skewform
from .triangulation import TriangulationError, classify_flip, parse_triangulation, puncture_matrix, sigma

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4


class ParseError(Exception):
    pass


def _c(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _matrix(M) -> list:
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return [[_c(z) for z in row] for row in M]
    return M.astype(int).tolist()


def _digest(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _rounded(values, digits: int = 9) -> list:
    return [_c(complex(round(complex(z).real, digits), round(complex(z).imag, digits)))
            for z in np.ravel(values)]


def _tolerance() -> float:
    raw = os.environ.get("QTEICH_TOL")
    if raw is None:
        return 1e-10
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"QTEICH_TOL is not a number: {raw!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def _load_tri(path: str):
    try:
        return parse_triangulation(_read(path))
    except TriangulationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _load_moves(path: str):
    try:
        return flipaction.parse_moves(_read(path))
    except TriangulationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _parse_weights(text: str | None, n: int) -> np.ndarray:
    if text is None:
        return np.ones(n, dtype=complex)
    try:
        x = np.array([complex(w.replace(" ", "")) for w in text.split(",")])
    except ValueError:
        raise ParseError(f"cannot read weights {text!r}") from None
    if len(x) != n:
        raise ParseError(f"expected {n} weights, got {len(x)}")
    return x


# -- subcommands ------------------------------------------------------------------

def cmd_sigma(args) -> dict:
    tri = _load_tri(args.tri)
    return {"sigma": _matrix(sigma(tri)), "puncture_matrix": _matrix(puncture_matrix(tri))}


def cmd_normal_form(args) -> dict:
    tri = _load_tri(args.tri)
    nf = skewform.normal_form_of(tri)
    return {"A": _matrix(nf.A), "A_inv": _matrix(nf.A_inv), "D": _matrix(nf.D),
            "block_profile": list(nf.block_profile)}


def _data_for(args, tri):
    if args.data:
        try:
            return repbuild.ClassifyingData.from_json(json.loads(_read(args.data)))
        except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"{args.data}: malformed classifying data ({exc})") from None
    return repbuild.classifying_data(tri, args.N, _parse_weights(args.x, tri.n_edges))


def cmd_rep(args) -> dict:
    tri = _load_tri(args.tri)
    data = _data_for(args, tri)
    rep = repbuild.build_irrep(tri, args.N, data)
    return {"data": data.to_json(), "representation": rep.to_json(),
            "relation_errors": repbuild.relation_errors(rep, data)}


def cmd_flip(args) -> dict:
    tri = _load_tri(args.tri)
    moves = _load_moves(args.moves)
    x = _parse_weights(args.x, tri.n_edges)
    steps, cur = [], tri
    for mv in moves:
        entry = {"move": str(mv)}
        if isinstance(mv, flipaction.Flip):
            entry["case"] = classify_flip(cur, mv.edge).case.value
        steps.append(entry)
        cur = flipaction.apply_move(cur, mv)
    y, tris = flipaction.push_weights(tri, x, moves)
    return {"steps": steps, "triangulation": tris[-1].to_text(), "weights": [_c(z) for z in y]}


def _mapping_class(args):
    tri = _load_tri(args.tri)
    moves = _load_moves(args.mc)
    return flipaction.MappingClass(tri, moves)


def cmd_shadow_fix(args) -> dict:
    mc = _mapping_class(args)
    fps = hypshadow.fixed_point(mc, n_seeds=args.seeds, seed=args.seed, tol=_tolerance())
    return {"fixed_points": [fp.to_json() for fp in fps]}


def cmd_invariant(args) -> dict:
    mc = _mapping_class(args)
    fp = hypshadow.geometric_fixed_point(mc, n_seeds=args.seeds, seed=args.seed, tol=_tolerance())
    rep = invariant.preferred_rep(mc, args.N, fp)
    L = invariant.intertwiner(mc, rep)
    report = invariant.invariants_of(L)
    audit = {
        "triangulation": _digest(mc.base.to_text()),
        "moves": _digest(mc.to_text()),
        "fixed_point": _digest(_rounded(fp.x)),
        "representation": _digest([_rounded(M, 7) for M in rep.mats]),
        "intertwiner": _digest(_rounded(L.L, 7)),
    }
    return {
        "N": args.N,
        "dim": rep.dim,
        "fixed_point": fp.to_json(),
        "intertwiner_residual": L.residual,
        "nullspace_dim": L.nullspace_dim,
        "invariants": report.to_json(),
        "audit": audit,
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qteich", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tri=True):
        if tri:
            sp.add_argument("--tri", required=True, help="triangulation file")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed")
        return sp

    common(sub.add_parser("sigma", help="spike-count form and puncture matrix"))
    common(sub.add_parser("normal-form", help="unimodular block normal form"))
    sp = common(sub.add_parser("rep", help="irreducible representation"))
    sp.add_argument("--N", type=int, required=True, help="root-of-unity order")
    sp.add_argument("--x", help="comma-separated edge weights (default all 1)")
    sp.add_argument("--data", help="classifying data JSON (overrides --x)")
    sp = common(sub.add_parser("flip", help="apply a move list to a triangulation and weights"))
    sp.add_argument("--moves", required=True, help="move file: one 'flip i' or 'perm ...' per line")
    sp.add_argument("--x", help="comma-separated edge weights (default all 1)")
    sp = common(sub.add_parser("shadow-fix", help="fixed points of a mapping class on weights"))
    sp.add_argument("--mc", required=True, help="move file describing the mapping class")
    sp.add_argument("--seeds", type=int, default=32, help="Newton starting points")
    sp = common(sub.add_parser("invariant", help="intertwiner invariant for odd N"))
    sp.add_argument("--mc", required=True, help="move file describing the mapping class")
    sp.add_argument("--N", type=int, required=True, help="odd root-of-unity order")
    sp.add_argument("--seeds", type=int, default=32, help="Newton starting points")
    return p


COMMANDS = {
    "sigma": cmd_sigma,
    "normal-form": cmd_normal_form,
    "rep": cmd_rep,
    "flip": cmd_flip,
    "shadow-fix": cmd_shadow_fix,
    "invariant": cmd_invariant,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "N", None) is not None:
        if args.N < 2:
            parser.error("--N must be at least 2")
        if args.command == "invariant" and args.N % 2 == 0:
            parser.error("invariant requires odd N; the preferred representation is only defined then")
    try:
        result = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"qteich: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (hypshadow.NoFixedPointError, flipaction.NumericalDegeneracyError,
            np.linalg.LinAlgError) as exc:
        print(f"qteich {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError, invariant.IntertwinerError) as exc:
        print(f"qteich {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = json.dumps(result, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
