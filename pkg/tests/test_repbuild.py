import itertools
import json

import numpy as np
import pytest

from qteich.cfalgebra import Ambient, central_elements, q_power, q_value
from qteich.repbuild import (
    ClassifyingData,
    RepresentationError,
    build_irrep,
    classifying_data,
    commutant_dim,
    direct_sum,
    evaluate,
    intertwiner_space,
    relation_errors,
    rep_dimension,
    weyl_factor,
)
from qteich.triangulation import (
    four_punctured_sphere,
    punctured_torus,
    random_triangulation,
    three_punctured_sphere,
)


def random_weights(n, rng, unit=False):
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    return z if unit else z * rng.uniform(0.5, 2.0, n)


def roots(z, N):
    r = complex(z) ** (1 / N)
    return [r * np.exp(2j * np.pi * k / N) for k in range(N)]


def test_weyl_factor_d3():
    q = q_value(3)
    f = weyl_factor(3, q)
    assert np.allclose(f.U, np.diag([1, q ** 2, q ** 4]))
    assert np.allclose(f.V, np.roll(np.eye(3), 1, axis=0))
    assert np.allclose(f.U @ f.V, q ** 2 * f.V @ f.U)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_weyl_factor_powers(d):
    f = weyl_factor(d, q_value(d), u=1.3 - 0.2j, v=0.7j)
    assert np.allclose(np.linalg.matrix_power(f.U, d), f.u ** d * np.eye(d))


def test_weyl_factor_shift_conjugation():
    # rho_{u, q^2 v} is rho_{u, v} conjugated by rho_{u, v}(U)
    q = q_value(5)
    a = weyl_factor(5, q, u=1.1, v=0.8)
    b = weyl_factor(5, q, u=1.1, v=0.8 * q ** 2)
    Ui = np.linalg.inv(a.U)
    assert np.allclose(a.U @ a.U @ Ui, b.U)
    assert np.allclose(a.U @ a.V @ Ui, b.V)


def test_weyl_factor_rejects_zero():
    with pytest.raises(ValueError):
        weyl_factor(3, q_value(3), u=0)


@pytest.mark.parametrize("g,p,N,dim", [(1, 1, 3, 3), (1, 1, 5, 5), (1, 1, 4, 2), (0, 4, 3, 3),
                                       (0, 4, 4, 4), (2, 1, 3, 81), (2, 1, 2, 4), (0, 3, 5, 1)])
def test_dimension_formula(g, p, N, dim):
    assert rep_dimension(g, p, N) == dim


def test_torus_trivial_data():
    tri = punctured_torus()
    data = classifying_data(tri, 3, np.ones(3), h=1.0)
    rep = build_irrep(tri, 3, data)
    assert rep.dim == 3
    for M in rep.mats:
        assert np.allclose(np.linalg.matrix_power(M, 3), np.eye(3))


CASES = [(punctured_torus(), 3), (punctured_torus(), 5), (punctured_torus(), 4), (punctured_torus(), 6),
         (four_punctured_sphere(), 3), (four_punctured_sphere(), 5), (four_punctured_sphere(), 2),
         (random_triangulation(1, 2, rng=0), 3), (random_triangulation(0, 5, rng=0), 2),
         (random_triangulation(2, 1, rng=0), 2)]


@pytest.mark.parametrize("tri,N", CASES)
def test_random_irreps(tri, N, rng):
    x = random_weights(tri.n_edges, rng)
    data = classifying_data(tri, N, x)
    rep = build_irrep(tri, N, data)
    assert rep.dim == rep_dimension(tri.genus, tri.punctures, N)
    errs = relation_errors(rep, data)
    assert max(errs.values()) < 1e-10
    assert commutant_dim(rep) == 1
    assert np.allclose(rep.shadow(), x)
    # H^2 = P_1 ... P_p at matrix level
    P = rep.puncture_values()
    h = rep.central_character().h
    assert abs(h ** 2 - np.prod(P)) < 1e-9


def test_evaluate_homomorphism(rng):
    tri = four_punctured_sphere()
    rep = build_irrep(tri, 3, classifying_data(tri, 3, random_weights(6, rng)))
    amb = Ambient.of(tri, 3)
    assert np.allclose(evaluate(rep, amb.X(1) * amb.X(2)), rep.X(1) @ rep.X(2))
    for _ in range(10):
        a = amb.weyl(rng.integers(-2, 3, 6)) + 0.5 * amb.X(3)
        b = amb.weyl(rng.integers(-2, 3, 6)) - amb.one()
        assert np.allclose(evaluate(rep, a * b), evaluate(rep, a) @ evaluate(rep, b))
    ce = central_elements(tri, 3)
    assert np.allclose(evaluate(rep, ce.H), rep.data.h * np.eye(rep.dim))


def test_direct_sum_is_reducible(rng):
    tri = punctured_torus()
    rep = build_irrep(tri, 3, classifying_data(tri, 3, random_weights(3, rng)))
    assert commutant_dim(direct_sum(rep, rep)) == 4


def test_tensor_of_irreps_irreducible(rng):
    # torus (X_1..X_3) times tetrahedron (Y_1..Y_6): generators X_i (x) 1 and 1 (x) Y_j
    t1, t2 = punctured_torus(), four_punctured_sphere()
    a = build_irrep(t1, 3, classifying_data(t1, 3, random_weights(3, rng)))
    b = build_irrep(t2, 3, classifying_data(t2, 3, random_weights(6, rng)))
    gens = [np.kron(M, np.eye(b.dim)) for M in a.mats] + [np.kron(np.eye(a.dim), M) for M in b.mats]
    d = a.dim * b.dim
    stack = np.vstack([np.kron(np.eye(d), G) - np.kron(G.T, np.eye(d)) for G in gens])
    s = np.linalg.svd(stack, compute_uv=False)
    assert np.sum(s < 1e-8 * s[0]) == 1


def pairwise_non_isomorphic(reps):
    for a, b in itertools.combinations(reps, 2):
        if len(intertwiner_space(a, b)) != 0:
            return False
    return True


def test_root_choices_torus_odd(rng):
    tri = punctured_torus()
    x = random_weights(3, rng)
    base = classifying_data(tri, 3, x)
    reps = [build_irrep(tri, 3, classifying_data(tri, 3, x, h=h)) for h in roots(base.h ** 3, 3)]
    assert len(reps) == 3 ** 1
    assert pairwise_non_isomorphic(reps)


def test_root_choices_three_punctured_sphere(rng):
    tri = three_punctured_sphere()
    x = random_weights(3, rng)
    base = classifying_data(tri, 3, x)
    reps = []
    for h, p1, p2 in itertools.product(roots(base.h ** 3, 3), *[roots(p ** 3, 3) for p in base.p_roots]):
        reps.append(build_irrep(tri, 3, classifying_data(tri, 3, x, h=h, p_roots=[p1, p2])))
    assert len(reps) == 27
    assert pairwise_non_isomorphic(reps)


def test_root_choices_torus_even(rng):
    tri = punctured_torus()
    x = random_weights(3, rng)
    base = classifying_data(tri, 4, x)
    reps = []
    for h in roots(base.h ** 4, 4):
        for signs in itertools.product((1, -1), repeat=2):
            a = base.a_roots * np.array(signs)
            reps.append(build_irrep(tri, 4, classifying_data(tri, 4, x, h=h, a_roots=a)))
    assert len(reps) == 2 ** 2 * 4
    assert pairwise_non_isomorphic(reps)


def test_inconsistent_data_rejected(rng):
    tri = punctured_torus()
    x = random_weights(3, rng)
    good = classifying_data(tri, 3, x)
    with pytest.raises(RepresentationError):
        build_irrep(tri, 3, ClassifyingData(3, x, good.h * 1.1, []))
    with pytest.raises(RepresentationError):
        build_irrep(tri, 3, ClassifyingData(3, np.r_[x[:2], 0], good.h, []))
    with pytest.raises(RepresentationError):
        build_irrep(tri, 5, good)


def test_even_n_needs_homology_roots(rng):
    tri = punctured_torus()
    x = random_weights(3, rng)
    good = classifying_data(tri, 4, x)
    with pytest.raises(RepresentationError):
        build_irrep(tri, 4, ClassifyingData(4, x, good.h, [], []))


def test_json_roundtrip(rng):
    tri = four_punctured_sphere()
    data = classifying_data(tri, 3, random_weights(6, rng))
    back = ClassifyingData.from_json(json.loads(json.dumps(data.to_json())))
    assert np.allclose(back.x, data.x) and np.allclose(back.p_roots, data.p_roots)
    assert back.h == data.h


def test_deterministic(rng):
    tri = random_triangulation(1, 2, rng=3)
    data = classifying_data(tri, 3, random_weights(tri.n_edges, rng))
    a, b = build_irrep(tri, 3, data), build_irrep(tri, 3, data)
    assert all(np.array_equal(u, v) for u, v in zip(a.mats, b.mats))


def test_q_power_of_commutation_sign():
    # sanity of the phase used in relation checks
    assert abs(q_power(3, 2) - q_value(3) ** 2) < 1e-12
