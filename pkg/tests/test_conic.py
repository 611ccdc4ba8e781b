import numpy as np
import pytest

from cogrelay.conic import (PSD, SOC, ConeProgram, Free, NonNeg, Status, embed_hermitian,
                            extract_hermitian, farkas_valid, smat, solve, svec, svec_dim)

cp = pytest.importorskip("cvxpy")


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_lp_one_dimensional():
    prog = ConeProgram(c=[-1.0, 0.0], A=[[1.0, -1.0]], b=[1.0], cones=[NonNeg(1), NonNeg(1)])
    sol = solve(prog)
    assert sol.status is Status.OPTIMAL
    assert sol.x[0] == pytest.approx(1.0, abs=1e-7)
    assert sol.objective == pytest.approx(-1.0, abs=1e-7)


def test_soc_norm():
    # variables (t, u1, u2) in SOC(3); u fixed to (3, 4); maximize -t
    prog = ConeProgram(c=[-1.0, 0, 0], A=[[0, 1.0, 0], [0, 0, 1.0]], b=[3.0, 4.0],
                       cones=[SOC(3)])
    sol = solve(prog)
    assert sol.optimal and sol.x[0] == pytest.approx(5.0, abs=1e-6)


def test_psd_minimum_eigenvalue():
    # minimize Tr(diag(1,2) X), Tr X = 1  ->  value 1 at X = e1 e1^T
    prog = ConeProgram(c=-svec(np.diag([1.0, 2.0])), A=[svec(np.eye(2))], b=[1.0],
                       cones=[PSD(2)])
    sol = solve(prog)
    assert sol.optimal
    assert -sol.objective == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(smat(sol.x), np.diag([1.0, 0.0]), atol=1e-6)


def test_zero_budget():
    # maximize Tr X s.t. Tr X + s = 0, s >= 0
    prog = ConeProgram(c=np.r_[svec(np.eye(2)), 0.0], A=[np.r_[svec(np.eye(2)), 1.0]], b=[0.0],
                       cones=[PSD(2), NonNeg(1)])
    sol = solve(prog)
    assert sol.optimal
    assert abs(sol.objective) <= 1e-7
    assert np.abs(smat(sol.x[:3])).max() <= 1e-6


def test_free_variable():
    # maximize -s with x free, x - s = -2, s >= 0  ->  s = 0, x = -2
    prog = ConeProgram(c=[0.0, -1.0], A=[[1.0, -1.0]], b=[-2.0], cones=[Free(1), NonNeg(1)])
    sol = solve(prog)
    assert sol.optimal
    assert sol.x[0] == pytest.approx(-2.0, abs=1e-7)


def test_infeasible_certificate():
    # x >= 0 with x = -1
    prog = ConeProgram(c=[1.0], A=[[1.0]], b=[-1.0], cones=[NonNeg(1)])
    sol = solve(prog)
    assert sol.status is Status.PRIMAL_INFEASIBLE
    assert farkas_valid(prog, sol.y)


def test_unbounded_detected():
    prog = ConeProgram(c=[1.0, 0.0], A=[[1.0, -1.0]], b=[0.0], cones=[NonNeg(1), NonNeg(1)])
    sol = solve(prog)
    assert sol.status is Status.DUAL_INFEASIBLE
    assert np.allclose(prog.A @ sol.x, 0, atol=1e-8)
    assert prog.c @ sol.x > 0


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        ConeProgram(c=[1.0, 2.0], A=[[1.0, 1.0]], b=[1.0], cones=[PSD(2)])


def test_unknown_cone():
    from cogrelay.conic import Cone
    with pytest.raises(ValueError):
        Cone("exp", 3)


def test_dump_load_round_trip(rng):
    prog = ConeProgram(c=rng.standard_normal(5), A=rng.standard_normal((2, 5)),
                       b=rng.standard_normal(2), cones=[NonNeg(1), PSD(2), Free(1)])
    back = ConeProgram.load(prog.dump())
    assert np.array_equal(back.c, prog.c) and np.array_equal(back.A, prog.A)
    assert np.array_equal(back.b, prog.b) and back.cones == prog.cones


def test_svec_inner_product(rng):
    for _ in range(20):
        k = rng.integers(1, 6)
        A = rng.standard_normal((k, k)); A = A + A.T
        B = rng.standard_normal((k, k)); B = B + B.T
        assert svec(A) @ svec(B) == pytest.approx(np.trace(A @ B))
        assert np.allclose(smat(svec(A)), A)
        assert svec(A).size == svec_dim(k)


# embedding

def test_embed_identity():
    assert np.array_equal(embed_hermitian(np.eye(3)), np.eye(6))


def test_embed_eigenvalue_doubling_example():
    E = embed_hermitian(np.array([[2, 1j], [-1j, 2]]))
    assert np.allclose(np.linalg.eigvalsh(E), [1, 1, 3, 3])


def test_embed_trace_convention():
    n = 3
    assert np.trace(embed_hermitian(np.eye(n)) @ embed_hermitian(np.eye(n))) == 2 * n


def test_embed_rejects_non_hermitian():
    with pytest.raises(ValueError):
        embed_hermitian(np.array([[0, 1], [0, 0]], complex))


def test_extract_round_trip_and_noise(rng):
    for _ in range(20):
        n = rng.integers(1, 5)
        A = crandn(rng, n, n)
        H = A + A.conj().T
        assert np.array_equal(extract_hermitian(embed_hermitian(H)), H)
        noisy = embed_hermitian(H) + 1e-12 * rng.standard_normal((2 * n, 2 * n))
        X = extract_hermitian(noisy)
        assert np.abs(X - X.conj().T).max() == 0
        assert np.abs(X - H).max() <= 2e-12


def test_embed_psd_iff_psd(rng):
    for _ in range(50):
        n = rng.integers(1, 5)
        A = crandn(rng, n, n)
        H = A @ A.conj().T - rng.uniform(0, 2) * np.eye(n)
        lam = np.linalg.eigvalsh(H)
        mu = np.linalg.eigvalsh(embed_hermitian(H))
        assert np.allclose(np.sort(np.repeat(lam, 2)), mu)
        assert (lam.min() >= 0) == (mu.min() >= 0)


# cross-check against an independent modelling route and solver

def _random_sdp(rng, k=3, m=3):
    """Hermitian-trace SDP: maximize Re Tr(C X) s.t. Re Tr(A_i X) <= b_i, Tr X <= 1."""
    C = crandn(rng, k, k); C = C + C.conj().T
    As = []
    for _ in range(m):
        Z = crandn(rng, k, k)
        As.append(Z @ Z.conj().T)
    b = rng.uniform(0.5, 2.0, m)
    return C, As, b


def test_random_complex_sdp_matches_clarabel(rng):
    for _ in range(5):
        k, m = 3, 3
        C, As, b = _random_sdp(rng, k, m)
        # ours: variables (Z = embed X, slacks)
        n = svec_dim(2 * k)
        rows = []
        for i, Ai in enumerate(As + [np.eye(k)]):
            r = np.zeros(n + m + 1)
            r[:n] = 0.5 * svec(embed_hermitian(Ai))
            r[n + i] = 1.0
            rows.append(r)
        c = np.zeros(n + m + 1)
        c[:n] = 0.5 * svec(embed_hermitian(C))
        prog = ConeProgram(c=c, A=np.array(rows), b=np.r_[b, 1.0],
                           cones=[PSD(2 * k)] + [NonNeg(1)] * (m + 1))
        sol = solve(prog)
        assert sol.optimal
        X = cp.Variable((k, k), hermitian=True)
        cons = [X >> 0, cp.real(cp.trace(X)) <= 1]
        cons += [cp.real(cp.trace(Ai @ X)) <= bi for Ai, bi in zip(As, b)]
        pr = cp.Problem(cp.Maximize(cp.real(cp.trace(C @ X))), cons)
        pr.solve(solver=cp.CLARABEL)
        assert sol.objective == pytest.approx(pr.value, rel=1e-6, abs=1e-7)
        Xo = extract_hermitian(smat(sol.x[:n], 2 * k))
        assert np.real(np.trace(C @ Xo)) == pytest.approx(sol.objective, rel=1e-7, abs=1e-8)


def test_duality_gap_and_residuals(rng):
    C, As, b = _random_sdp(rng)
    k, m = 3, 3
    n = svec_dim(2 * k)
    rows = []
    for i, Ai in enumerate(As):
        r = np.zeros(n + m)
        r[:n] = 0.5 * svec(embed_hermitian(Ai))
        r[n + i] = 1.0
        rows.append(r)
    c = np.zeros(n + m)
    c[:n] = 0.5 * svec(embed_hermitian(C))
    prog = ConeProgram(c=c, A=np.array(rows), b=b, cones=[PSD(2 * k)] + [NonNeg(1)] * m)
    sol = solve(prog)
    assert sol.optimal
    tol = 1e-8
    assert abs(sol.objective - b @ sol.y) <= 10 * tol * (1 + abs(sol.objective))
    assert sol.primal_residual <= 1e-7 and sol.dual_residual <= 1e-7
    again = solve(prog)
    assert np.array_equal(sol.x, again.x) and np.array_equal(sol.y, again.y)


def test_random_infeasible_certificates(rng):
    for _ in range(10):
        k = 2
        n = svec_dim(k)
        # Tr X = -a  with X PSD is infeasible for a > 0
        a = rng.uniform(0.1, 3)
        prog = ConeProgram(c=rng.standard_normal(n), A=[svec(np.eye(k))], b=[-a], cones=[PSD(k)])
        sol = solve(prog)
        assert sol.status is Status.PRIMAL_INFEASIBLE
        assert farkas_valid(prog, sol.y)
