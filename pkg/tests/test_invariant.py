import numpy as np
import pytest

from qteich.cfalgebra import central_elements
from qteich.flipaction import Flip, MappingClass, Reindex
from qteich.hypshadow import geometric_fixed_point
from qteich.invariant import (
    IntertwinerError,
    canonical_spectrum,
    intertwiner,
    invariants_of,
    orbit_invariant,
    preferred_rep,
    same_projective_spectrum,
)
from qteich.repbuild import build_irrep, classifying_data, evaluate, relation_errors
from qteich.triangulation import find_relabelings, four_punctured_sphere, punctured_torus

FIG8 = [Flip(1), Flip(2), Reindex((3, 1, 2))]


@pytest.fixture(scope="module")
def fig8():
    mc = MappingClass(punctured_torus(), FIG8)
    return mc, geometric_fixed_point(mc)


def test_preferred_rep_n3(fig8):
    mc, fp = fig8
    rep = preferred_rep(mc, 3, fp)
    assert rep.dim == 3
    ce = central_elements(mc.base, 3)
    assert np.allclose(evaluate(rep, ce.H), np.eye(3), atol=1e-10)
    assert np.allclose(evaluate(rep, ce.P[0]), np.eye(3), atol=1e-10)
    assert max(relation_errors(rep, rep.data).values()) < 1e-10


def test_even_n_rejected(fig8):
    mc, fp = fig8
    with pytest.raises(ValueError, match="odd"):
        preferred_rep(mc, 4, fp)


@pytest.mark.parametrize("N", [3, 5])
def test_intertwiner_unique(fig8, N):
    mc, fp = fig8
    rep = preferred_rep(mc, N, fp)
    L = intertwiner(mc, rep)
    assert L.nullspace_dim == 1 and L.residual < 1e-8
    assert abs(np.linalg.det(L.L) - 1) < 1e-8
    for A, B in zip(rep.mats, L.pushed.mats):
        assert np.allclose(B @ L.L, L.L @ A, atol=1e-8)


def test_identity_class():
    tri = punctured_torus()
    mc = MappingClass(tri, [])
    rep = build_irrep(tri, 3, classifying_data(tri, 3, [1.2, 0.7j, -2.0]))
    L = intertwiner(mc, rep)
    assert np.allclose(L.L, L.L[0, 0] * np.eye(3), atol=1e-10)
    assert np.allclose(L.spectrum(), 1)


@pytest.mark.parametrize("N", [3, 5])
def test_inverse_class_inverse_spectrum(fig8, N):
    mc, fp = fig8
    rep = preferred_rep(mc, N, fp)
    a = intertwiner(mc, rep).spectrum()
    b = intertwiner(mc.inverse(), rep).spectrum()
    assert same_projective_spectrum(1 / a, b)


def test_presentation_independence(fig8):
    mc, _ = fig8
    conj = mc.conjugate([Flip(1)])
    for N in (3, 5):
        s1 = intertwiner(mc, preferred_rep(mc, N)).spectrum()
        s2 = intertwiner(conj, preferred_rep(conj, N)).spectrum()
        assert same_projective_spectrum(s1, s2)


def test_frozen_n3_trace_product(fig8):
    # Tr(L) Tr(L^-1) vanishes at N = 3: the spectrum is 3 equally spaced points up to scale
    mc, fp = fig8
    report = invariants_of(intertwiner(mc, preferred_rep(mc, 3, fp)))
    assert abs(report.trace_product) < 1e-8
    assert report.dim == 3


def test_report_of_identity():
    r = invariants_of(np.eye(4))
    assert np.allclose(r.spectrum, 1)
    assert abs(r.trace_product - 16) < 1e-12


def test_report_similarity_and_scale(rng):
    d = 5
    L = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    C = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    base = invariants_of(L)
    for M in (C @ L @ np.linalg.inv(C), np.exp(2j * np.pi / d) * L, 3.7j * L):
        r = invariants_of(M)
        assert same_projective_spectrum(r.spectrum, base.spectrum)
        assert abs(r.trace_product - base.trace_product) < 1e-8 * abs(base.trace_product)


def test_canonical_spectrum_scale_free(rng):
    e = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert np.allclose(canonical_spectrum(e), canonical_spectrum(2.5j * e))


def test_orbit_invariant_preferred(fig8):
    mc, fp = fig8
    assert orbit_invariant(mc, preferred_rep(mc, 3, fp)).k == 1


def test_orbit_invariant_identity():
    tri = four_punctured_sphere()
    rep = build_irrep(tri, 3, classifying_data(tri, 3, np.full(6, 0.8 + 0.3j)))
    assert orbit_invariant(MappingClass(tri, []), rep).k == 1


def test_orbit_invariant_follows_punctures():
    # rotations of the tetrahedron permute the punctures; distinct P roots force k = order
    tri = four_punctured_sphere()
    x = np.full(6, 1.3 + 0.4j)
    base = classifying_data(tri, 3, x).p_roots[0]
    roots = [base * np.exp(2j * np.pi * k / 3) for k in range(3)]
    rep = build_irrep(tri, 3, classifying_data(tri, 3, x, p_roots=roots))
    orders = set()
    for perm in find_relabelings(tri, tri):
        mc = MappingClass(tri, [Reindex(perm)])
        order = next(k for k in range(1, 7) if compose_power(perm, k) == tuple(range(1, 7)))
        out = orbit_invariant(mc, rep)
        assert out.k == order and out.intertwiner.nullspace_dim == 1
        orders.add(order)
    assert orders == {1, 2, 3}


def compose_power(perm, k):
    out = tuple(range(1, len(perm) + 1))
    for _ in range(k):
        out = tuple(out[p - 1] for p in perm)
    return out


def test_unfixed_rep_raises(fig8):
    mc, _ = fig8
    tri = mc.base
    rep = build_irrep(tri, 3, classifying_data(tri, 3, [1.2, 0.7j, -2.0]))
    with pytest.raises(IntertwinerError, match="dimension 0"):
        intertwiner(mc, rep)


def test_wrong_base_raises(fig8):
    mc, _ = fig8
    tri = four_punctured_sphere()
    rep = build_irrep(tri, 3, classifying_data(tri, 3, np.ones(6)))
    with pytest.raises(IntertwinerError):
        intertwiner(mc, rep)
