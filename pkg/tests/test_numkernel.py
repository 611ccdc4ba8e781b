import numpy as np
import pytest

from cogrelay.numkernel import (NotPositiveDefinite, hermitian_eig, inv_sqrt_psd, is_hermitian,
                                kron, nullspace_real, orthonormal_basis, unvec, vec)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# orthonormal_basis

def test_basis_single_unit_vector():
    U, N = orthonormal_basis([np.array([1, 0], complex)])
    assert N == 1
    assert np.allclose(U[:, 0], [1, 0])


def test_basis_plane_from_three_vectors():
    e1, e2 = np.eye(3)[:2]
    U, N = orthonormal_basis([e1, e2, e1 + e2])
    assert N == 2
    P = U @ U.conj().T
    assert np.allclose(P @ (e1 + e2), e1 + e2)
    assert np.allclose(P @ np.array([0, 0, 1.0]), 0)


def test_basis_collinear(rng):
    g = crandn(rng, 4)
    U, N = orthonormal_basis([g, 2 * g, 3 * g])
    assert N == 1
    assert np.allclose(U[:, 0], g / np.linalg.norm(g))


def test_basis_order_is_semantic(rng):
    a, b, c = crandn(rng, 4), crandn(rng, 4), crandn(rng, 4)
    U, _ = orthonormal_basis([b, a, c])
    assert np.allclose(U[:, 0], b / np.linalg.norm(b))


def test_basis_all_zero_raises():
    with pytest.raises(ValueError, match="degenerate span"):
        orthonormal_basis([np.zeros(3), np.zeros(3)])


def test_basis_orthonormality_and_span(rng):
    for _ in range(50):
        M = rng.integers(1, 6)
        vs = [crandn(rng, M) for _ in range(rng.integers(1, 5))]
        U, N = orthonormal_basis(vs)
        assert N <= min(M, len(vs))
        assert np.linalg.norm(U.conj().T @ U - np.eye(N)) <= 1e-10
        for v in vs:
            assert np.linalg.norm(v - U @ (U.conj().T @ v)) <= 1e-7 * np.linalg.norm(v)


# hermitian_eig

def test_eig_identity():
    lam, V, r = hermitian_eig(np.eye(2))
    assert np.allclose(lam, [1, 1]) and r == 2


def test_eig_diag_rank():
    lam, _, r = hermitian_eig(np.diag([3.0, 0.0]))
    assert np.allclose(lam, [3, 0]) and r == 1


def test_eig_2x2_by_hand():
    lam, _, _ = hermitian_eig(np.array([[2, 1j], [-1j, 2]]))
    assert np.allclose(lam, [3, 1], atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[1, 2], [0, 1]], complex))


def test_eig_reconstruction_and_phase_convention(rng):
    for _ in range(50):
        n = rng.integers(1, 6)
        A = crandn(rng, n, n)
        H = A + A.conj().T
        lam, V, _ = hermitian_eig(H)
        assert np.all(np.diff(lam) <= 0)
        assert np.abs(V @ np.diag(lam) @ V.conj().T - H).max() <= 1e-9 * np.abs(lam).max()
        for k in range(n):
            j = np.argmax(np.abs(V[:, k]) >= np.abs(V[:, k]).max() * (1 - 1e-12))
            assert abs(V[j, k].imag) <= 1e-14 and V[j, k].real > 0
        lam2, V2, _ = hermitian_eig(H)
        assert np.array_equal(lam, lam2) and np.array_equal(V, V2)


# nullspace_real

def test_nullspace_full_rank_empty():
    assert nullspace_real(np.eye(2)).shape == (2, 0)


def test_nullspace_line():
    N = nullspace_real(np.array([[1.0, 1.0]]))
    assert N.shape == (2, 1)
    assert np.allclose(np.abs(N[:, 0]), [1 / np.sqrt(2)] * 2)
    assert N[0, 0] * N[1, 0] < 0


def test_nullspace_zero_map():
    assert nullspace_real(np.zeros((1, 3))).shape == (3, 3)


def test_nullspace_residual(rng):
    for _ in range(30):
        p, q = rng.integers(1, 5), rng.integers(1, 7)
        A = rng.standard_normal((p, q))
        N = nullspace_real(A)
        assert N.shape[1] == q - np.linalg.matrix_rank(A)
        if N.size:
            assert np.abs(A @ N).max() <= 1e-7 * np.linalg.norm(A)


# kron / vec

def test_kron_identity_blockdiag(rng):
    B = crandn(rng, 2, 3)
    K = kron(np.eye(2), B)
    assert np.array_equal(K[:2, :3], B) and np.array_equal(K[2:, 3:], B)
    assert not np.any(K[:2, 3:]) and not np.any(K[2:, :3])


def test_vec_column_stacking():
    assert np.array_equal(vec(np.array([[1, 3], [2, 4]])), [1, 2, 3, 4])
    assert np.array_equal(unvec(np.arange(6), 2, 3), np.arange(6).reshape(3, 2).T)


def test_trace_vec_identity_random(rng):
    A, B, C, D = (crandn(rng, 2, 2) for _ in range(4))
    lhs = np.trace(A @ B @ C @ D)
    rhs = vec(D.T) @ kron(C.T, A) @ vec(B)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


# inv_sqrt_psd

def test_inv_sqrt_identity():
    assert np.allclose(inv_sqrt_psd(np.eye(3)), np.eye(3))


def test_inv_sqrt_diag():
    assert np.allclose(inv_sqrt_psd(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))


def test_inv_sqrt_rank_one_plus_identity():
    b = np.array([[1.0, 0.0]])
    R = inv_sqrt_psd(1.0 * b.conj().T @ b + np.eye(2))
    assert np.allclose(R, np.diag([1 / np.sqrt(2), 1.0]))


@pytest.mark.parametrize("H", [np.diag([1.0, 0.0]), np.diag([1.0, -1.0]), np.zeros((2, 2))])
def test_inv_sqrt_rejects_singular(H):
    with pytest.raises(NotPositiveDefinite, match="not positive definite"):
        inv_sqrt_psd(H)


def test_inv_sqrt_properties(rng):
    for _ in range(30):
        n = rng.integers(1, 5)
        A = crandn(rng, n, n)
        H = A @ A.conj().T + 0.1 * np.eye(n)
        R = inv_sqrt_psd(H)
        assert np.abs(R @ H @ R - np.eye(n)).max() <= 1e-8
        assert np.abs(R @ H - H @ R).max() <= 1e-8 * np.abs(H).max()


def test_is_hermitian_tolerance():
    H = np.array([[1, 1j], [-1j, 1]])
    assert is_hermitian(H)
    assert not is_hermitian(H + np.array([[0, 1e-6], [0, 0]]))
    assert not is_hermitian(np.ones((2, 3)))
