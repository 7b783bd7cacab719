import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qteich.skewform import (
    NormalFormError,
    as_int_matrix,
    int_det,
    kernel_basis,
    n_kernel_check,
    n_kernel_span_check,
    normal_form,
    normal_form_of,
    smith_normal_form,
    solve_mod,
    z2_basis,
)
from qteich.triangulation import (
    dual_graph,
    four_punctured_sphere,
    puncture_matrix,
    punctured_torus,
    random_triangulation,
    sigma,
)

SURFACES = [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1), (1, 3), (0, 6)]


def check_normal_form(tri):
    nf = normal_form_of(tri)
    S = as_int_matrix(sigma(tri))
    assert (nf.A.dot(S).dot(nf.A.T) == nf.D).all()
    assert abs(int_det(nf.A)) == 1
    assert (nf.A.dot(nf.A_inv) == as_int_matrix(np.eye(tri.n_edges, dtype=int))).all()
    g, p = tri.genus, tri.punctures
    k = 2 * g + p - 3
    expected = np.zeros((tri.n_edges,) * 2, dtype=int)
    for b in range(g + k):
        d = 2 if b < g else 1
        expected[2 * b, 2 * b + 1], expected[2 * b + 1, 2 * b] = -d, d
    assert np.array_equal(nf.D.astype(int), expected)
    return nf


def test_torus_block():
    nf = check_normal_form(punctured_torus())
    assert nf.D.astype(int).tolist() == [[0, -2, 0], [2, 0, 0], [0, 0, 0]]
    assert nf.block_profile == (1, 0, 1)


def test_tetrahedron_block():
    nf = check_normal_form(four_punctured_sphere())
    D = nf.D.astype(int)
    assert D[:2, :2].tolist() == [[0, -1], [1, 0]]
    assert not D[2:].any() and not D[:, 2:].any()


def test_zero_matrix_reducer():
    nf = normal_form(np.zeros((3, 3), dtype=int), 0, 3)
    assert not nf.D.astype(int).any()
    assert abs(int_det(nf.A)) == 1


def test_wrong_profile_raises():
    with pytest.raises(NormalFormError):
        normal_form(sigma(punctured_torus()), 0, 3)


@pytest.mark.parametrize("g,p", SURFACES)
@pytest.mark.parametrize("seed", range(4))
def test_random_normal_forms(g, p, seed):
    tri = random_triangulation(g, p, rng=100 * seed + 7 * g + p)
    check_normal_form(tri)
    rank = np.linalg.matrix_rank(sigma(tri).astype(float))
    assert rank == tri.n_edges - p


def test_exact_integers_survive_large_entries():
    M = as_int_matrix([[0, 10**30], [-(10**30), 0]])
    assert int_det(M) == 10**60


def test_torus_kernel():
    gens = kernel_basis(punctured_torus()).generators
    assert [list(g) for g in gens] == [[1, 1, 1]]


@pytest.mark.parametrize("g,p", SURFACES)
def test_kernel_generators(g, p):
    tri = random_triangulation(g, p, rng=g * 31 + p)
    gens = kernel_basis(tri).generators
    assert len(gens) == p
    S = sigma(tri)
    for v in gens:
        assert not (S @ v).any()
    # independent over Z: p unit invariant factors
    _, D, _ = smith_normal_form(np.array(gens))
    diag = [abs(int(D[i, i])) for i in range(p)]
    assert diag == [1] * p
    assert np.linalg.matrix_rank(np.array(gens, dtype=float)) == p


def test_n_kernel_examples():
    tri = random_triangulation(1, 2, rng=1)
    n = tri.n_edges
    for N in (2, 3, 4, 5):
        e1 = np.zeros(n, dtype=int)
        e1[0] = N
        assert n_kernel_check(tri, N, e1)
        assert n_kernel_check(tri, N, np.ones(n, dtype=int))


@pytest.mark.parametrize("N", [3, 5, 4, 6])
@pytest.mark.parametrize("g,p", [(1, 1), (0, 4), (1, 2)])
def test_n_kernel_matches_generators(N, g, p):
    # the congruence test and the span description agree on every vector in a box
    tri = random_triangulation(g, p, rng=N + g + p)
    n = tri.n_edges
    rng = np.random.default_rng(N)
    vecs = [rng.integers(0, N, n) for _ in range(150)]
    vecs += [np.array(v) for v in itertools.islice(itertools.product(range(N), repeat=n), 0, None, max(1, N ** n // 200))]
    for v in vecs:
        assert n_kernel_check(tri, N, v) == n_kernel_span_check(tri, N, v)


def test_odd_n_non_member():
    tri = punctured_torus()
    assert not n_kernel_check(tri, 3, [1, 0, 0])
    assert not n_kernel_span_check(tri, 3, [1, 0, 0])


def test_torus_z2_basis():
    vecs = z2_basis(punctured_torus()).vectors
    assert len(vecs) == 2
    span = {tuple((a * np.array(vecs[0]) + b * np.array(vecs[1])) % 2) for a in (0, 1) for b in (0, 1)}
    assert span == {(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)}


@pytest.mark.parametrize("g,p", [(1, 1), (1, 2), (2, 1), (1, 3)])
def test_z2_vectors_are_cycles(g, p):
    tri = random_triangulation(g, p, rng=5)
    G = dual_graph(tri)
    vecs = z2_basis(tri).vectors
    assert len(vecs) == 2 * g
    for v in vecs:
        deg = np.zeros(tri.n_triangles, dtype=int)
        for e in np.flatnonzero(v) + 1:
            (t0, _), (t1, _) = G.ends[int(e)]
            deg[t0] += 1
            deg[t1] += 1
        assert (deg % 2 == 0).all()
    K = puncture_matrix(tri) % 2
    stack = np.vstack([K] + [np.array(v) % 2 for v in vecs])
    assert gf2_rank(stack) == gf2_rank(K) + 2 * g


def gf2_rank(M):
    M = np.array(M, dtype=np.int64) % 2
    r = 0
    for c in range(M.shape[1]):
        piv = next((i for i in range(r, M.shape[0]) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(M.shape[0]):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
    return r


@given(st.lists(st.integers(-6, 6), min_size=9, max_size=9), st.integers(2, 9))
def test_solve_mod_solutions_are_solutions(entries, N):
    M = np.array(entries).reshape(3, 3)
    b = M @ np.array([1, 2, 3])
    x = solve_mod(M, b, N)
    assert x is not None
    assert ((as_int_matrix(M).dot(as_int_matrix(x)) - b) % N == 0).all()


@given(st.integers(0, 5000))
def test_normal_form_property(seed):
    tri = random_triangulation(1, 2, rng=seed, n_flips=10)
    check_normal_form(tri)
