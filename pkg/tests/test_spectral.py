from __future__ import annotations

import numpy as np
import pytest

from radial_embed import spectral
from radial_embed.graphs import Graph, gen_balanced_tree, gen_erdos_renyi, gen_grid, gen_watts_strogatz, largest_connected_component
from radial_embed.spectral import SpectralError, laplacian, laplacian_eigenpairs, spectral_init


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_laplacian_small_cases():
    assert laplacian(Graph.from_edges(2, [(0, 1)])).toarray().tolist() == [[1, -1], [-1, 1]]
    k3 = laplacian(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])).toarray()
    assert np.array_equal(k3, 3 * np.eye(3) - np.ones((3, 3)))
    star = laplacian(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])).toarray()
    assert np.diag(star).tolist() == [3, 1, 1, 1]


def test_path3_first_eigenvector():
    lam, V = laplacian_eigenpairs(gen_balanced_tree(1, 2), 1)
    assert lam[0] == pytest.approx(1.0, abs=1e-12)
    # sign convention makes the first largest-magnitude entry positive
    assert np.allclose(V[0], np.array([1, 0, -1]) / np.sqrt(2), atol=1e-12)
    lam2, _ = laplacian_eigenpairs(gen_balanced_tree(1, 2), 2)
    assert np.allclose(lam2, [1, 3])


def test_cycle_degenerate_pair_is_orthonormal():
    lam, V = laplacian_eigenpairs(cycle(4), 2)
    assert np.allclose(lam, [2, 2], atol=1e-12)
    assert np.allclose(V @ V.T, np.eye(2), atol=1e-8)
    L = laplacian(cycle(4)).toarray()
    # basis rotation inside the eigenspace is allowed; the projector is unique
    proj = V.T @ V
    assert np.allclose(L @ proj, 2 * proj, atol=1e-10)


@pytest.mark.parametrize(
    "g",
    [gen_grid(5, 7), gen_balanced_tree(3, 4), largest_connected_component(gen_erdos_renyi(300, 0.03, 1))[0], gen_watts_strogatz(200, 6, 0.2, 2)],
    ids=["grid", "tree", "er", "ws"],
)
def test_contract_on_families(g):
    d = 4
    lam, V = laplacian_eigenpairs(g, d)
    L = laplacian(g)
    assert np.all(np.diff(lam) >= -1e-12) and np.all(lam > 1e-10)
    assert np.allclose(np.linalg.norm(V, axis=1), 1.0, atol=1e-12)
    assert np.allclose(V.sum(axis=1), 0.0, atol=1e-8)
    for k in range(d):
        phi = V[k]
        assert np.linalg.norm(L @ phi - lam[k] * phi) <= 1e-6
        assert phi @ (L @ phi) == pytest.approx(lam[k], rel=1e-8)
        top = np.flatnonzero(np.abs(phi) >= np.abs(phi).max() * (1 - 1e-9))[0]
        assert phi[top] > 0
    dense = np.sort(np.linalg.eigvalsh(L.toarray()))[1:d + 1]
    assert np.allclose(lam, dense, atol=1e-9)


def test_sparse_path_matches_dense(monkeypatch):
    g = largest_connected_component(gen_erdos_renyi(400, 0.02, 5))[0]
    lam_d, V_d = laplacian_eigenpairs(g, 3)
    monkeypatch.setattr(spectral, "DENSE_MAX_N", 10)
    lam_s, V_s = laplacian_eigenpairs(g, 3)
    assert np.allclose(lam_d, lam_s, atol=1e-9)
    # compare projectors so the test does not depend on the basis inside the span
    assert np.allclose(V_d.T @ V_d, V_s.T @ V_s, atol=1e-6)


def test_errors():
    with pytest.raises(SpectralError):
        laplacian_eigenpairs(Graph.from_edges(4, [(0, 1), (2, 3)]), 1)
    with pytest.raises(SpectralError):
        laplacian_eigenpairs(cycle(4), 4)
    with pytest.raises(SpectralError):
        laplacian_eigenpairs(cycle(4), 0)


def test_inverse_sqrt_scaling():
    g = gen_grid(3, 4)
    lam, V = laplacian_eigenpairs(g, 2)
    P = spectral_init(g, 2, scale_by_inv_sqrt_lambda=True)
    assert np.allclose(P, V / np.sqrt(lam)[:, None])
    assert np.array_equal(spectral_init(g, 2), V)


def test_deterministic():
    g = gen_watts_strogatz(150, 4, 0.1, 3)
    assert np.array_equal(spectral_init(g, 3), spectral_init(g, 3))
