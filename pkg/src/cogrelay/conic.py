"""Small dense cone programs over free, nonnegative, second-order and PSD blocks.

A :class:`ConeProgram` is posed in equality standard form::

    maximize    c'x
    subject to  A x = b
                x in K = K_1 x ... x K_p

and its dual is ``minimize b'y  s.t.  A'y - c in K*``. PSD blocks store a
real symmetric k x k matrix in the scaled vectorisation ``svec`` (lower
triangle, column major, off-diagonals times sqrt(2)) so inner products are
plain dot products.

The interior-point work is delegated to ``cvxopt.solvers.conelp`` (a
homogeneous self-dual method with Nesterov-Todd scaling). The program is
handed over in cvxopt's *dual* form, which keeps its Newton systems of
order ``len(b)``; that is tiny for every program built in this package.
"""

import enum
import io
from dataclasses import dataclass, field

import numpy as np
from cvxopt import matrix as _cvx_matrix
from cvxopt import solvers as _cvx_solvers

from .numkernel import is_hermitian

SQRT2 = np.sqrt(2.0)


# --------------------------------------------------------------------------
# scaled symmetric vectorisation


def svec_dim(k):
    return k * (k + 1) // 2


def _tril_index(k):
    rows, cols = [], []
    for j in range(k):
        for i in range(j, k):
            rows.append(i)
            cols.append(j)
    return np.array(rows), np.array(cols)


def svec(S):
    S = np.asarray(S, dtype=float)
    k = S.shape[0]
    r, c = _tril_index(k)
    v = S[r, c].copy()
    v[r != c] *= SQRT2
    return v


def smat(v, k=None):
    v = np.asarray(v, dtype=float)
    if k is None:
        k = int(round((np.sqrt(8 * v.size + 1) - 1) / 2))
    r, c = _tril_index(k)
    vals = v.copy()
    vals[r != c] /= SQRT2
    S = np.zeros((k, k))
    S[r, c] = vals
    S[c, r] = vals
    return S


# --------------------------------------------------------------------------
# complex Hermitian <-> real symmetric


def embed_hermitian(H):
    """Real symmetric embedding ``[[Re H, -Im H], [Im H, Re H]]``."""
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H, 1e-9):
        raise ValueError("matrix is not Hermitian")
    Re, Im = H.real, H.imag
    return np.block([[Re, -Im], [Im, Re]])


def extract_hermitian(E):
    """Inverse of :func:`embed_hermitian`, symmetrising any residual noise."""
    E = np.asarray(E, dtype=float)
    n = E.shape[0] // 2
    E11, E12 = E[:n, :n], E[:n, n:]
    E21, E22 = E[n:, :n], E[n:, n:]
    H = 0.5 * (E11 + E22) + 0.5j * (E21 - E12)
    return 0.5 * (H + H.conj().T)


# --------------------------------------------------------------------------
# program / solution types


@dataclass(frozen=True)
class Cone:
    """One cone block. ``size`` is the vector length, or the matrix order for PSD."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("free", "nonneg", "soc", "psd"):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("cone size must be positive")

    @property
    def dim(self):
        return svec_dim(self.size) if self.kind == "psd" else self.size


def Free(k):
    return Cone("free", k)


def NonNeg(k):
    return Cone("nonneg", k)


def SOC(k):
    return Cone("soc", k)


def PSD(k):
    return Cone("psd", k)


@dataclass
class ConeProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cones: tuple

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.A = np.asarray(self.A, dtype=float).reshape(self.b.size, -1)
        self.cones = tuple(self.cones)
        n = sum(k.dim for k in self.cones)
        if self.A.shape[1] != n or self.c.size != n:
            raise ValueError(
                f"dimension mismatch: cones span {n} variables, "
                f"A has {self.A.shape[1]} columns, c has {self.c.size}")

    @property
    def n(self):
        return self.c.size

    @property
    def m(self):
        return self.b.size

    def offsets(self):
        out, o = [], 0
        for k in self.cones:
            out.append((o, o + k.dim))
            o += k.dim
        return out

    def dump(self):
        """Plain-text description of the program for offline cross-checking."""
        buf = io.StringIO()
        buf.write(f"n {self.n}\nm {self.m}\n")
        buf.write("cones " + " ".join(f"{k.kind}:{k.size}" for k in self.cones) + "\n")
        buf.write("c " + " ".join(repr(float(v)) for v in self.c) + "\n")
        buf.write("b " + " ".join(repr(float(v)) for v in self.b) + "\n")
        for row in self.A:
            buf.write("A " + " ".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def load(cls, text):
        c = b = None
        rows, cones = [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, rest = line.partition(" ")
            if key == "cones":
                for tok in rest.split():
                    kind, size = tok.split(":")
                    cones.append(Cone(kind, int(size)))
            elif key == "c":
                c = [float(t) for t in rest.split()]
            elif key == "b":
                b = [float(t) for t in rest.split()]
            elif key == "A":
                rows.append([float(t) for t in rest.split()])
        return cls(c=np.array(c), A=np.array(rows).reshape(len(b), -1),
                   b=np.array(b), cones=tuple(cones))


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class ConeSolution:
    status: Status
    x: np.ndarray = None
    y: np.ndarray = None
    objective: float = np.nan
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    gap: float = np.nan
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL


# --------------------------------------------------------------------------
# cone geometry helpers


def cone_violation(v, cones):
    """Largest amount by which ``v`` lies outside the (self-dual) cone ``K``.

    Free blocks are skipped; callers checking a dual slack must test them
    for zero separately.
    """
    worst, o = 0.0, 0
    for k in cones:
        blk = v[o:o + k.dim]
        o += k.dim
        if k.kind == "free":
            continue
        if k.kind == "nonneg":
            worst = max(worst, float(-blk.min()))
        elif k.kind == "soc":
            worst = max(worst, float(np.linalg.norm(blk[1:]) - blk[0]))
        else:
            worst = max(worst, float(-np.linalg.eigvalsh(smat(blk, k.size))[0]))
    return worst


def _free_part(v, cones):
    parts, o = [], 0
    for k in cones:
        if k.kind == "free":
            parts.append(v[o:o + k.dim])
        o += k.dim
    return np.concatenate(parts) if parts else np.zeros(0)


# --------------------------------------------------------------------------
# solver


def _build_cvx(program):
    """Translate to cvxopt's ``min c'u  s.t. G u + s = h, s in K; A u = b``.

    The cvxopt primal variable ``u`` plays the role of our dual ``y``;
    cvxopt's cone multiplier ``z`` is our cone part of ``x`` and its
    equality multiplier is minus our free part of ``x``.
    """
    A, c = program.A, program.c
    m = program.m
    g_rows, h_rows = [], []
    free_cols, free_c = [], []
    dims = {"l": 0, "q": [], "s": []}
    blocks = {"nonneg": [], "soc": [], "psd": []}
    for (lo, hi), k in zip(program.offsets(), program.cones):
        if k.kind == "free":
            free_cols.append(A[:, lo:hi])
            free_c.append(c[lo:hi])
        else:
            blocks[k.kind].append((lo, hi, k))

    for lo, hi, k in blocks["nonneg"]:
        g_rows.append(-A[:, lo:hi].T)
        h_rows.append(-c[lo:hi])
        dims["l"] += k.size
    for lo, hi, k in blocks["soc"]:
        g_rows.append(-A[:, lo:hi].T)
        h_rows.append(-c[lo:hi])
        dims["q"].append(k.size)
    for lo, hi, k in blocks["psd"]:
        kk = k.size
        r, cc = _tril_index(kk)
        scale = np.where(r == cc, 1.0, 1.0 / SQRT2)
        Gs = np.zeros((kk * kk, m))
        hs = np.zeros(kk * kk)
        colA = A[:, lo:hi].T * scale[:, None]
        ccoef = c[lo:hi] * scale
        # column-major full storage; both triangles filled
        Gs[r + kk * cc] = -colA
        Gs[cc + kk * r] = -colA
        hs[r + kk * cc] = -ccoef
        hs[cc + kk * r] = -ccoef
        g_rows.append(Gs)
        h_rows.append(hs)
        dims["s"].append(kk)

    G = np.vstack(g_rows) if g_rows else np.zeros((0, m))
    h = np.concatenate(h_rows) if h_rows else np.zeros(0)
    if free_cols:
        Aeq = np.hstack(free_cols).T
        beq = np.concatenate(free_c)
    else:
        Aeq = np.zeros((0, m))
        beq = np.zeros(0)
    return G, h, Aeq, beq, dims, blocks


def _unpack_x(program, blocks, z, yeq):
    """Map cvxopt multipliers back into our primal vector."""
    x = np.zeros(program.n)
    o = 0
    for lo, hi, k in blocks["nonneg"] + blocks["soc"]:
        x[lo:hi] = z[o:o + k.dim]
        o += k.dim
    for lo, hi, k in blocks["psd"]:
        kk = k.size
        Z = z[o:o + kk * kk].reshape((kk, kk), order="F")
        x[lo:hi] = svec(0.5 * (Z + Z.T))
        o += kk * kk
    f = 0
    for (lo, hi), k in zip(program.offsets(), program.cones):
        if k.kind == "free":
            x[lo:hi] = -yeq[f:f + k.dim]
            f += k.dim
    return x


def _residuals(program, x, y):
    A, b, c = program.A, program.b, program.c
    pres = np.linalg.norm(A @ x - b) / (1 + np.linalg.norm(b))
    s = A.T @ y - c
    dres = max(cone_violation(s, program.cones),
               float(np.max(np.abs(_free_part(s, program.cones)), initial=0.0)))
    dres /= 1 + np.linalg.norm(c)
    gap = abs(c @ x - b @ y)
    return float(pres), float(dres), float(gap)


def solve(program, tol=1e-8, max_iter=200, retries=2):
    """Solve a :class:`ConeProgram`.

    Returns a :class:`ConeSolution`. ``PRIMAL_INFEASIBLE`` carries a Farkas
    ray in ``y`` with ``A'y in K*`` and ``b'y = -1``; ``DUAL_INFEASIBLE``
    (unbounded) carries a primal ray ``x`` with ``Ax = 0``, ``x in K`` and
    ``c'x = 1``.

    When the interior-point iteration stalls before reaching ``tol`` it is
    restarted with the tolerance loosened tenfold, at most ``retries``
    times; ``info["tol"]`` records the tolerance actually met.
    """
    if not isinstance(program, ConeProgram):
        raise TypeError("expected a ConeProgram")
    cvx = _build_cvx(program)
    sol = None
    for k in range(retries + 1):
        t = tol * 10.0 ** k
        sol = _solve_once(program, cvx, t, max_iter)
        sol.info["tol"] = t
        if sol.status not in (Status.NUMERICAL_FAILURE, Status.MAX_ITERATIONS):
            break
    return sol


def _solve_once(program, cvx, tol, max_iter):
    G, h, Aeq, beq, dims, blocks = cvx
    opts = {"show_progress": False, "maxiters": int(max_iter),
            "abstol": tol * 1e-2, "reltol": tol, "feastol": tol, "refinement": 2}
    args = dict(c=_cvx_matrix(program.b.copy()), G=_cvx_matrix(G),
                h=_cvx_matrix(h), dims=dims, options=opts)
    if Aeq.shape[0]:
        args["A"] = _cvx_matrix(Aeq)
        args["b"] = _cvx_matrix(beq)
    try:
        res = _cvx_solvers.conelp(**args)
    except (ValueError, ArithmeticError) as exc:
        return ConeSolution(Status.NUMERICAL_FAILURE, info={"error": str(exc)})

    st = res["status"]
    iters = int(res.get("iterations", 0))
    if st == "optimal":
        y = np.array(res["x"]).ravel()
        z = np.array(res["z"]).ravel()
        yeq = np.array(res["y"]).ravel() if Aeq.shape[0] else np.zeros(0)
        x = _unpack_x(program, blocks, z, yeq)
        pres, dres, gap = _residuals(program, x, y)
        return ConeSolution(Status.OPTIMAL, x=x, y=y, objective=float(program.c @ x),
                            primal_residual=pres, dual_residual=dres, gap=gap,
                            iterations=iters)
    if st == "dual infeasible":
        # cvxopt primal ray u: G u <= 0 (in K), A u = 0, c'u = -1  => our Farkas y
        y = np.array(res["x"]).ravel()
        return ConeSolution(Status.PRIMAL_INFEASIBLE, y=y, iterations=iters)
    if st == "primal infeasible":
        z = np.array(res["z"]).ravel()
        yeq = np.array(res["y"]).ravel() if Aeq.shape[0] else np.zeros(0)
        x = _unpack_x(program, blocks, z, yeq)
        return ConeSolution(Status.DUAL_INFEASIBLE, x=x, iterations=iters)
    status = Status.MAX_ITERATIONS if iters >= max_iter else Status.NUMERICAL_FAILURE
    return ConeSolution(status, iterations=iters, info={"cvxopt_status": st})


def farkas_valid(program, y, tol=1e-8):
    """Check a primal-infeasibility certificate: ``A'y in K*`` and ``b'y < 0``."""
    s = program.A.T @ y
    scale = max(1.0, float(np.linalg.norm(y)) * max(1.0, float(np.abs(program.A).max())))
    ok_free = np.all(np.abs(_free_part(s, program.cones)) <= tol * scale)
    return bool(ok_free and cone_violation(s, program.cones) <= tol * scale
                and program.b @ y < 0)
