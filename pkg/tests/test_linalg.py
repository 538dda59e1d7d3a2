import numpy as np
import pytest

from dicke_ising.linalg import (EigenSolveError, eigh_small, extremal_eigenpair,
                                svd_truncated)


def jacobi_singular_values(a, sweeps=100, tol=1e-15):
    """One-sided Jacobi SVD, the independent oracle for singular values."""
    w = np.array(a, dtype=float, copy=True)
    n = w.shape[1]
    for _ in range(sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = np.dot(w[:, p], w[:, q])
                app = np.dot(w[:, p], w[:, p])
                aqq = np.dot(w[:, q], w[:, q])
                if abs(apq) <= tol * np.sqrt(app * aqq) or app * aqq == 0:
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, q]
                w[:, q] = s * wp + c * w[:, q]
        if not rotated:
            break
    return np.sort(np.linalg.norm(w, axis=0))[::-1]


def test_svd_identity():
    res = svd_truncated(np.eye(4), cutoff=0.0)
    np.testing.assert_allclose(res.s, np.ones(4))
    assert res.discarded_weight == 0.0


def test_svd_rank_one():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(6)
    y = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    y /= np.linalg.norm(y)
    res = svd_truncated(np.outer(x, y), cutoff=1e-12, max_rank=10)
    assert res.s.size == 1
    assert abs(res.s[0] - 1.0) < 1e-12


def test_svd_against_jacobi_oracle(rng):
    m = rng.standard_normal((8, 6))
    res = svd_truncated(m, cutoff=0.0)
    np.testing.assert_allclose(res.s, jacobi_singular_values(m), atol=1e-10)


def test_svd_reconstruction_and_isometry(rng):
    for shape in ((12, 7), (5, 9), (16, 16), (64, 48)):
        m = rng.standard_normal(shape)
        for cutoff, max_rank in ((0.0, None), (1e-2, None), (0.0, 3)):
            res = svd_truncated(m, cutoff=cutoff, max_rank=max_rank)
            r = res.s.size
            np.testing.assert_allclose(res.u.T @ res.u, np.eye(r), atol=1e-12)
            np.testing.assert_allclose(res.vt @ res.vt.T, np.eye(r), atol=1e-12)
            assert np.all(np.diff(res.s) <= 1e-14)
            err = np.linalg.norm(m - res.u @ np.diag(res.s) @ res.vt, "fro") ** 2
            scale = max(np.linalg.norm(m, "fro") ** 2, 1e-30)
            assert abs(err - res.discarded_weight) < 1e-10 * scale


def test_svd_cutoff_semantics(rng):
    m = np.diag([1.0, 0.5, 1e-6, 1e-7])
    res = svd_truncated(m, cutoff=1e-10)
    assert res.s.size == 2
    total = 1.0 + 0.25 + 1e-12 + 1e-14
    assert res.discarded_weight <= 1e-10 * total


def test_svd_keeps_degenerate_multiplet():
    m = np.diag([1.0, 0.5, 0.5, 0.5, 1e-9])
    res = svd_truncated(m, cutoff=0.2)  # cutoff alone would keep 1.0 + one 0.5
    assert res.s.size == 4              # whole 0.5-multiplet kept
    res = svd_truncated(m, cutoff=0.2, max_rank=3)
    assert res.s.size == 3              # cap wins, deterministic by index


def test_svd_rejects_nonfinite():
    with pytest.raises(ValueError):
        svd_truncated(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_eigh_examples():
    vals, _ = eigh_small(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(vals, [1.0, 2.0, 3.0])
    q = np.zeros((3, 3))
    q[0, 2] = q[2, 0] = 0.37
    vals, _ = eigh_small(q)
    np.testing.assert_allclose(vals, [-0.37, 0.0, 0.37], atol=1e-14)
    vals, _ = eigh_small(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(vals, [-1.0, 1.0], atol=1e-14)


def test_eigh_residual_and_orthonormality(rng):
    for dim in (2, 5, 9, 16):
        m = rng.standard_normal((dim, dim))
        m = 0.5 * (m + m.T)
        vals, vecs = eigh_small(m)
        assert np.max(np.abs(m @ vecs - vecs * vals)) < 1e-10
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(dim), atol=1e-12)


def test_eigh_rejects_asymmetry_and_size():
    with pytest.raises(ValueError):
        eigh_small(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eigh_small(np.eye(17))


def test_lanczos_diagonal():
    a = np.diag([-2.0, 0.0, 1.0, 5.0])
    lam, v = extremal_eigenpair(lambda x: a @ x, 4, np.ones(4), tol=1e-12)
    assert abs(lam + 2.0) < 1e-12
    assert abs(abs(v[0]) - 1.0) < 1e-8


def test_lanczos_identity():
    init = np.array([3.0, 4.0, 0.0])
    lam, v = extremal_eigenpair(lambda x: x, 3, init, tol=1e-12)
    assert abs(lam - 1.0) < 1e-12
    np.testing.assert_allclose(v, init / 5.0, atol=1e-12)


def test_lanczos_two_site_ising_block(rng):
    # 4x4 chain block with omega0 = 0.1, J = -1: ground energy -0.35
    from dicke_ising.ed import ed_dense_matrix
    from dicke_ising.model import HamiltonianSpec

    h = ed_dense_matrix(HamiltonianSpec(onsite_z=np.full(2, 0.1), nn_zz=-1.0,
                                        onsite_x=np.zeros(2)))
    init = rng.standard_normal(4)
    lam, _ = extremal_eigenpair(lambda x: h @ x, 4, init, tol=1e-12)
    assert abs(lam + 0.35) < 1e-12


def test_lanczos_matches_eigh(rng):
    for dim in range(2, 17):
        m = rng.standard_normal((dim, dim))
        m = 0.5 * (m + m.T)
        ref = np.linalg.eigvalsh(m)[0]
        lam, v = extremal_eigenpair(lambda x, m=m: m @ x, dim,
                                    rng.standard_normal(dim), tol=1e-12)
        assert abs(lam - ref) < 1e-9
        assert np.linalg.norm(m @ v - lam * v) < 1e-9


def test_lanczos_deterministic(rng):
    m = rng.standard_normal((40, 40))
    m = 0.5 * (m + m.T)
    init = rng.standard_normal(40)
    out1 = extremal_eigenpair(lambda x: m @ x, 40, init, tol=1e-12)
    out2 = extremal_eigenpair(lambda x: m @ x, 40, init, tol=1e-12)
    assert out1[0] == out2[0]
    assert np.array_equal(out1[1], out2[1])


def test_lanczos_nonconvergence_error(rng):
    m = rng.standard_normal((60, 60))
    m = 0.5 * (m + m.T)
    with pytest.raises(EigenSolveError) as info:
        extremal_eigenpair(lambda x: m @ x, 60, rng.standard_normal(60),
                           tol=1e-15, max_iter=4, krylov_dim=3)
    assert info.value.eigenvalue is not None
    assert info.value.residual > 0


def test_lanczos_rejects_zero_init():
    with pytest.raises(ValueError):
        extremal_eigenpair(lambda x: x, 3, np.zeros(3))
