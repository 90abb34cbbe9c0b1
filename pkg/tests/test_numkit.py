import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import multiset_distance
from nhcage import numkit
from nhcage.errors import DimensionError, DomainError, RangeError


def jordan_block(c, n):
    return c * np.eye(n, dtype=complex) + np.eye(n, k=1, dtype=complex)


def conjugate(m, seed=0):
    """Similarity transform by a well conditioned random matrix."""
    rng = np.random.default_rng(seed)
    n = m.shape[0]
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    s = q @ np.diag(rng.uniform(0.5, 2.0, n))
    return s @ m @ np.linalg.inv(s)


def taylor_expm(a, terms=200):
    out = np.eye(a.shape[0], dtype=complex)
    term = out.copy()
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_as_cmatrix_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        numkit.as_cmatrix(np.zeros(3))
    with pytest.raises(DimensionError):
        numkit.as_cmatrix(np.zeros((2, 3)), square=True)
    with pytest.raises(ValueError):
        numkit.as_cmatrix([[np.nan]])


def test_eigvals_triangular():
    m = np.triu(np.arange(1, 17).reshape(4, 4)).astype(complex)
    assert multiset_distance(numkit.eigvals(m), [1, 6, 11, 16]) < 1e-12


def test_eigvals_rejects_rectangular():
    with pytest.raises(DimensionError):
        numkit.eigvals(np.zeros((2, 3)))


def test_sort_spectrum_ignores_rounding_noise():
    v = [1 + 1j, 1e-17 - 2j, -1e-17 + 3j, -1]
    out = numkit.sort_spectrum(v)
    assert list(out) == [-1, 1e-17 - 2j, -1e-17 + 3j, 1 + 1j]


def test_numerical_rank():
    a = np.outer([1, 2, 3], [1, 1, 1]) + np.outer([0, 1, 0], [1, 0, -1])
    assert numkit.numerical_rank(a) == 2
    assert numkit.numerical_rank(np.zeros((3, 3))) == 0
    with pytest.raises(DomainError):
        numkit.numerical_rank(a, tol=-1)


@pytest.mark.parametrize("seed", range(5))
def test_expm_against_taylor(seed):
    rng = np.random.default_rng(seed)
    a = (rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))) / 3
    ref = taylor_expm(a)
    assert np.abs(numkit.expm(a) - ref).max() < 1e-12 * np.abs(ref).max()


def test_expm_of_nilpotent_is_polynomial():
    n = jordan_block(0, 4)
    ref = np.eye(4) + n + n @ n / 2 + n @ n @ n / 6
    assert np.abs(numkit.expm(n) - ref).max() < 1e-14


def test_expm_overflow():
    with pytest.raises(RangeError):
        numkit.expm(np.array([[800.0]]))


def brute_krylov_rank(a, v):
    cols = [v]
    for _ in range(a.shape[0] - 1):
        cols.append(a @ cols[-1])
    k = np.column_stack(cols)
    norms = np.linalg.norm(k, axis=0)
    k = k[:, norms > 0] / norms[norms > 0]
    return numkit.numerical_rank(k, 1e-10) if k.size else 0


@pytest.mark.parametrize("n, start", [(5, 4), (5, 2), (5, 0), (3, 1)])
def test_krylov_dim_jordan(n, start):
    a = jordan_block(0, n)
    v = np.zeros(n)
    v[start] = 1.0
    # the shift matrix moves e_start down to e_0 and then kills it
    assert numkit.krylov_dim(a, v) == start + 1
    assert numkit.krylov_dim(a, v) == brute_krylov_rank(a, v)


def test_krylov_basis_is_orthonormal_and_invariant():
    a = conjugate(np.diag([1.0, 2.0, 2.0, 3.0, 5.0]).astype(complex), seed=3)
    v = np.ones(5)
    q = numkit.krylov_basis(a, v)
    assert q.shape[1] == 4  # four distinct eigenvalues
    assert np.abs(q.conj().T @ q - np.eye(4)).max() < 1e-12
    resid = a @ q - q @ (q.conj().T @ a @ q)
    assert np.abs(resid).max() < 1e-9 * numkit.norm_bound(a)


def test_krylov_zero_vector():
    with pytest.raises(DomainError):
        numkit.krylov_dim(np.eye(2), np.zeros(2))


def test_fit_loglog_slope():
    xs = np.logspace(-8, -4, 9)
    assert numkit.fit_loglog_slope(xs, 3 * xs ** 0.25) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(DomainError):
        numkit.fit_loglog_slope([1, 2], [0, 1])
    with pytest.raises(DimensionError):
        numkit.fit_loglog_slope([1], [1])


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_nilpotency_index_of_jordan_block(n):
    assert numkit.nilpotency_index(conjugate(jordan_block(0, n), seed=n)) == n


def test_nilpotency_index_rejects_decaying_powers():
    # spectral radius 0.5, powers decay geometrically but never collapse
    a = conjugate(np.diag([0.5, 0.4, -0.3]).astype(complex))
    assert numkit.nilpotency_index(a) is None
    assert numkit.nilpotency_index(np.eye(3)) is None


def test_nilpotency_index_zero_matrix():
    assert numkit.nilpotency_index(np.zeros((3, 3))) == 1


@pytest.mark.parametrize("blocks, expected", [
    ([(0, 4)], [(0, 4, 4)]),
    ([(2, 2), (-2, 2)], [(-2, 2, 2), (2, 2, 2)]),
    ([(1j, 1), (1j, 1), (-1j, 1)], [(-1j, 1, 1), (1j, 2, 1)]),
    ([(0, 3), (0, 1), (1, 2)], [(0, 4, 3), (1, 2, 2)]),
])
def test_eigen_clusters_on_jordan_forms(blocks, expected):
    n = sum(s for _, s in blocks)
    m = np.zeros((n, n), dtype=complex)
    i = 0
    for c, s in blocks:
        m[i:i + s, i:i + s] = jordan_block(c, s)
        i += s
    clusters = numkit.eigen_clusters(conjugate(m, seed=n))
    got = [(c.center, c.multiplicity, c.index) for c in clusters]
    assert len(got) == len(expected)
    for (c, mult, idx), (c0, mult0, idx0) in zip(got, expected):
        assert abs(c - c0) < 1e-12
        assert (mult, idx) == (mult0, idx0)
    assert all(c.verified for c in clusters)


def test_clustered_eigvals_beats_raw_at_defective_point():
    m = conjugate(jordan_block(0, 4), seed=11)
    raw = numkit.eigvals(m)
    assert np.abs(raw).max() > 1e-6  # eps**(1/4) splitting
    assert np.abs(numkit.clustered_eigvals(m)).max() < 1e-13


def test_clusters_keep_close_but_distinct_eigenvalues_apart():
    m = np.diag([1.0, 1.0 + 1e-4, 3.0]).astype(complex)
    clusters = numkit.eigen_clusters(m)
    assert [c.multiplicity for c in clusters] == [1, 1, 1]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3),
       st.integers(0, 1000))
def test_clusters_recover_random_jordan_structures(sizes, seed):
    rng = np.random.default_rng(seed)
    centers = [complex(x, y) for x, y in rng.uniform(-2, 2, size=(len(sizes), 2))]
    # keep distinct centers well apart
    if len(centers) > 1 and min(abs(a - b) for i, a in enumerate(centers)
                                for b in centers[i + 1:]) < 0.5:
        return
    n = sum(sizes)
    m = np.zeros((n, n), dtype=complex)
    i = 0
    for c, s in zip(centers, sizes):
        m[i:i + s, i:i + s] = jordan_block(c, s)
        i += s
    clusters = numkit.eigen_clusters(conjugate(m, seed=seed))
    got = sorted((c.multiplicity, c.index) for c in clusters)
    assert got == sorted((s, s) for s in sizes)
    for c in clusters:
        assert min(abs(c.center - z) for z in centers) < 1e-9


def test_norm_bound_dominates_spectral_norm():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(7, 7))
    assert numkit.norm_bound(a) >= np.linalg.norm(a, 2) - 1e-12
    assert math.isclose(numkit.norm_bound(np.eye(3)), 1.0)
