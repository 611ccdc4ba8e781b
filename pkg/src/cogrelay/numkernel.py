"""Dense complex linear algebra shared by every solver path.

All routines are pure functions on numpy arrays. The relative tolerance
``RANK_TOL`` is the single rank/independence threshold used across the
package.
"""

import numpy as np

RANK_TOL = 1e-7
HERMITIAN_TOL = 1e-12


class NotPositiveDefinite(ValueError):
    pass


def is_hermitian(H, tol=HERMITIAN_TOL):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        return False
    scale = np.max(np.abs(H)) if H.size else 0.0
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) <= tol * max(scale, 1e-300))


def orthonormal_basis(vectors, tol=RANK_TOL):
    """Gram-Schmidt orthonormalisation in input order.

    Parameters
    ----------
    vectors : sequence of array_like
        Complex vectors of equal length M.
    tol : float
        A vector whose residual after projection is below ``tol`` times its
        own norm (or below ``tol`` times the largest input norm) is treated
        as dependent and skipped.

    Returns
    -------
    U : ndarray, shape (M, N)
        Orthonormal columns; ``U[:, 0]`` is the normalised first nonzero
        input.
    N : int
        Effective dimension of the span.
    """
    vs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vs:
        raise ValueError("degenerate span")
    M = vs[0].size
    if M < 1 or any(v.size != M for v in vs):
        raise ValueError("all vectors must share a positive length")
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    vmax = max(np.linalg.norm(v) for v in vs)
    if vmax == 0:
        raise ValueError("degenerate span")

    cols = []
    for v in vs:
        nv = np.linalg.norm(v)
        if nv <= tol * vmax:
            continue
        r = v.copy()
        # two passes of classical GS keep orthogonality at machine level
        for _ in range(2):
            for u in cols:
                r -= (u.conj() @ r) * u
        nr = np.linalg.norm(r)
        if nr <= tol * nv:
            continue
        cols.append(r / nr)
        if len(cols) == M:
            break
    U = np.column_stack(cols)
    return U, U.shape[1]


def _fix_phase(V):
    # first entry of largest magnitude made real positive, column by column
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        mags = np.abs(col)
        j = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
        if mags[j] > 0:
            V[:, k] = col * (abs(col[j]) / col[j])
    return V


def hermitian_eig(H, tol=RANK_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors, rank)``; rank counts eigenvalues
    above ``tol * lambda_max``. Eigenvector phases are normalised so the
    first component of largest magnitude is real and positive.
    """
    H = np.asarray(H)
    if not is_hermitian(H, max(HERMITIAN_TOL, 1e-9)):
        raise ValueError("matrix is not Hermitian")
    Hs = 0.5 * (H + H.conj().T)
    lam, V = np.linalg.eigh(Hs)
    lam = lam[::-1].copy()
    V = V[:, ::-1]
    if np.iscomplexobj(V):
        V = _fix_phase(V)
    else:
        V = _fix_phase(V.astype(complex)).real
    lmax = lam[0] if lam.size else 0.0
    rank = int(np.sum(lam > tol * lmax)) if lmax > 0 else 0
    return lam, V, rank


def nullspace_real(A, tol=RANK_TOL):
    """Orthonormal basis (columns) of the null space of a real matrix."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    q = A.shape[1]
    if A.shape[0] == 0 or not np.any(A):
        return np.eye(q)
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol * s[0]))
    return Vt[rank:].conj().T.copy()


def kron(A, B):
    return np.kron(A, B)


def vec(A):
    """Column-stacking vectorisation."""
    return np.asarray(A).reshape(-1, order="F")


def unvec(v, rows, cols):
    return np.asarray(v).reshape((rows, cols), order="F")


def inv_sqrt_psd(H, tol=RANK_TOL):
    """Hermitian inverse square root of a positive definite matrix."""
    lam, V, _ = hermitian_eig(H, tol)
    if lam.size == 0 or lam[-1] <= tol * max(lam[0], 0.0) or lam[0] <= 0:
        raise NotPositiveDefinite("not positive definite")
    R = (V / np.sqrt(lam)) @ V.conj().T
    return 0.5 * (R + R.conj().T)
