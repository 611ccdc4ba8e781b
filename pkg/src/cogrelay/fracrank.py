"""Linear-fractional SDPs over Hermitian PSD blocks, and rank-one reduction.

A :class:`FractionalSdpSpec` describes::

    maximize    N(X) / (D(X) + d0)
    subject to  C_k(X) >= r_k           k = 1..K
                P(X) <= budget
                X_b PSD                 for every block b

where every functional is ``sum_b Re Tr(F_b X_b)``. :func:`solve_fractional`
uses the Charnes-Cooper change of variables ``Xbar = z X`` with
``z = 1/(D(X) + d0)`` to obtain a single SDP; :func:`bisection_oracle`
solves the same problem by quasi-convex bisection and exists only to check
the former.
"""

from dataclasses import dataclass, field

import numpy as np

from . import conic
from .conic import ConeProgram, NonNeg, PSD, Status, embed_hermitian, extract_hermitian, svec
from .numkernel import RANK_TOL, hermitian_eig, nullspace_real

Z_MIN = 1e-10
# relative functional change allowed when discarding sub-threshold eigenvalues
DROP_TOL = 1e-9


class Infeasible(Exception):
    """The constraint set is empty."""


class NumericalFailure(RuntimeError):
    """A solver or reduction step could not deliver a trustworthy answer."""


@dataclass
class FractionalSdpSpec:
    blocks: dict
    numerator: dict
    denominator: dict
    denominator_const: float
    constraints: list = field(default_factory=list)
    power: dict = field(default_factory=dict)
    budget: float = 1.0

    def __post_init__(self):
        if not self.denominator_const > 0:
            raise ValueError("denominator constant must be positive")
        for fn in [self.numerator, self.denominator, self.power] + [c for c, _ in self.constraints]:
            for name, F in fn.items():
                d = self.blocks[name]
                if np.shape(F) != (d, d):
                    raise ValueError(f"coefficient for block {name!r} must be {d}x{d}")

    @property
    def names(self):
        return list(self.blocks)

    @staticmethod
    def evaluate(fn, X):
        return float(sum(np.real(np.trace(F @ X[name])) for name, F in fn.items()))

    def ratio(self, X):
        return self.evaluate(self.numerator, X) / (self.evaluate(self.denominator, X)
                                                   + self.denominator_const)

    def constraint_margins(self, X):
        """Slack of every inequality at unscaled blocks ``X`` (>= 0 when feasible)."""
        out = [self.evaluate(fn, X) - rhs for fn, rhs in self.constraints]
        out.append(self.budget - self.evaluate(self.power, X))
        return np.array(out)

    def functional_values(self, scaled):
        """Values of :meth:`scaled_functionals` at (scaled) blocks."""
        return np.array([sum(np.real(np.trace(F @ scaled[nm]))
                             for nm, F in zip(self.names, row) if F is not None)
                         for row in self.scaled_functionals()])

    def functional_scales(self, scaled):
        """``sum_b |Re Tr(F_b X_b)|`` per functional (at least 1), for relative errors."""
        return np.array([max(1.0, sum(abs(np.real(np.trace(F @ scaled[nm])))
                                      for nm, F in zip(self.names, row) if F is not None))
                         for row in self.scaled_functionals()])

    def scaled_functionals(self):
        """Block-aligned coefficient lists of the rows Charnes-Cooper keeps fixed."""
        rows = [self.denominator] + [fn for fn, _ in self.constraints] + [self.power]
        return [[fn.get(name) for name in self.names] for fn in rows]


@dataclass
class CharnesCooperSolution:
    scaled: dict
    z: float
    blocks: dict
    objective: float
    iterations: int = 0
    reduction_iterations: int = 0


# --------------------------------------------------------------------------
# cone program assembly


def _row(fn, names, dims):
    parts = []
    for name in names:
        F = fn.get(name)
        if F is None:
            parts.append(np.zeros(conic.svec_dim(2 * dims[name])))
        else:
            parts.append(0.5 * svec(embed_hermitian(F)))
    return np.concatenate(parts)


def _layout(spec, extra):
    names = spec.names
    cones = [PSD(2 * spec.blocks[nm]) for nm in names] + [NonNeg(1)] * extra
    return names, cones


def _split_blocks(spec, x):
    out, o = {}, 0
    for name in spec.names:
        k = 2 * spec.blocks[name]
        n = conic.svec_dim(k)
        out[name] = extract_hermitian(conic.smat(x[o:o + n], k))
        o += n
    return out, o


def _row_scale(coef, rhs):
    # SINR rows may carry 1/threshold coefficients; equilibrate so tiny targets stay solvable
    s = max(np.abs(coef).max(initial=0.0), abs(rhs))
    return s if s > 0 else 1.0


def charnes_cooper_program(spec):
    """Cone program in ``(Xbar blocks, z, constraint slacks, power slack)``."""
    K = len(spec.constraints)
    names, cones = _layout(spec, 2 + K)
    nb = sum(c.dim for c in cones[:len(names)])
    n = nb + 2 + K
    iz = nb
    rows, rhs = [], []

    r = np.zeros(n)
    r[:nb] = _row(spec.denominator, names, spec.blocks)
    r[iz] = spec.denominator_const
    rows.append(r)
    rhs.append(1.0)
    for k, (fn, rk) in enumerate(spec.constraints):
        r = np.zeros(n)
        r[:nb] = _row(fn, names, spec.blocks)
        r[iz] = -rk
        r[:nb + 1] /= _row_scale(r[:nb], rk)
        r[iz + 1 + k] = -1.0
        rows.append(r)
        rhs.append(0.0)
    r = np.zeros(n)
    r[:nb] = _row(spec.power, names, spec.blocks)
    r[iz] = -spec.budget
    r[iz + 1 + K] = 1.0
    rows.append(r)
    rhs.append(0.0)

    c = np.zeros(n)
    c[:nb] = _row(spec.numerator, names, spec.blocks)
    return ConeProgram(c=c, A=np.array(rows), b=np.array(rhs), cones=cones)


def parametric_program(spec, t):
    """``max N(X) - t D(X)`` over the original (unscaled) constraints.

    The constant ``-t d0`` is left out of the objective.
    """
    K = len(spec.constraints)
    names, cones = _layout(spec, 1 + K)
    nb = sum(c.dim for c in cones[:len(names)])
    n = nb + 1 + K
    rows, rhs = [], []
    for k, (fn, rk) in enumerate(spec.constraints):
        r = np.zeros(n)
        sc = _row_scale(_row(fn, names, spec.blocks), rk)
        r[:nb] = _row(fn, names, spec.blocks) / sc
        r[nb + k] = -1.0
        rows.append(r)
        rhs.append(rk / sc)
    r = np.zeros(n)
    r[:nb] = _row(spec.power, names, spec.blocks)
    r[nb + K] = 1.0
    rows.append(r)
    rhs.append(spec.budget)
    c = np.zeros(n)
    c[:nb] = _row(spec.numerator, names, spec.blocks) - t * _row(spec.denominator, names, spec.blocks)
    return ConeProgram(c=c, A=np.array(rows), b=np.array(rhs), cones=cones)


# --------------------------------------------------------------------------
# solvers


def _check(sol):
    if sol.status is Status.PRIMAL_INFEASIBLE:
        raise Infeasible("constraint set is empty")
    if sol.status is not Status.OPTIMAL:
        raise NumericalFailure(f"cone solver ended with {sol.status.value}")


def solve_fractional(spec, tol=1e-8, max_iter=200):
    """Global optimum of the relaxed fractional program via Charnes-Cooper."""
    prog = charnes_cooper_program(spec)
    sol = conic.solve(prog, tol=tol, max_iter=max_iter)
    _check(sol)
    scaled, o = _split_blocks(spec, sol.x)
    z = float(sol.x[o])
    if z <= Z_MIN:
        raise NumericalFailure(f"normalisation scalar collapsed (z={z:.3g})")
    blocks = {nm: B / z for nm, B in scaled.items()}
    return CharnesCooperSolution(scaled=scaled, z=z, blocks=blocks,
                                 objective=float(sol.objective), iterations=sol.iterations)


def ratio_upper_bound(spec):
    """Bound on the ratio implied by the power budget alone."""
    total = 0.0
    for name, F in spec.numerator.items():
        lam_n = np.linalg.eigvalsh(F)[-1]
        if lam_n <= 0:
            continue
        P = spec.power.get(name)
        lam_p = np.linalg.eigvalsh(P)[0] if P is not None else 0.0
        if lam_p <= 0:
            return np.inf
        total += lam_n * spec.budget / lam_p
    return total / spec.denominator_const


def bisection_oracle(spec, tol_ratio=1e-6, tol=1e-8, max_steps=200):
    """Optimal ratio by bisection on ``t``; a test oracle, not a production path.

    ``t`` is achievable iff ``max N(X) - t (D(X) + d0) >= 0`` over the
    feasible set.
    """
    first = conic.solve(parametric_program(spec, 0.0), tol=tol)
    _check(first)
    lo = 0.0
    hi = min(ratio_upper_bound(spec), first.objective / spec.denominator_const)
    if hi <= 0:
        return 0.0
    for _ in range(max_steps):
        if hi - lo <= tol_ratio * max(hi, 1e-300) * 0.5:
            break
        t = 0.5 * (lo + hi)
        sol = conic.solve(parametric_program(spec, t), tol=tol)
        _check(sol)
        # the program's objective omits the constant -t d0
        if sol.objective - t * spec.denominator_const >= 0:
            lo = t
        else:
            hi = t
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# rank reduction


@dataclass
class RankReduction:
    blocks: list
    iterations: int
    initial_ranks: list
    ranks: list


def _herm_basis(r):
    basis = []
    for i in range(r):
        E = np.zeros((r, r), complex)
        E[i, i] = 1
        basis.append(E)
    for i in range(r):
        for j in range(i + 1, r):
            E = np.zeros((r, r), complex)
            E[i, j] = E[j, i] = 1
            basis.append(E)
            E = np.zeros((r, r), complex)
            E[i, j], E[j, i] = 1j, -1j
            basis.append(E)
    return np.array(basis).reshape(len(basis), r, r)


def _factor_block(X, coeffs, budget, tol):
    """Factor one block, dropping only eigen-directions that are negligible.

    A direction is dropped when its eigenvalue is below ``tol * lambda_max``
    and the running total of dropped contributions ``lambda |v^H F v|``
    stays within ``budget`` for every functional. Small eigenvalues with
    large functional coefficients are kept and reduced exactly.
    """
    lam, V, rank = hermitian_eig(X, tol)
    used = np.zeros(len(coeffs))
    keep = len(lam)
    while keep > rank:
        v, l = V[:, keep - 1], lam[keep - 1]
        if l > 0:
            c = np.array([0.0 if F is None else abs(l * np.real(v.conj() @ F @ v))
                          for F in coeffs])
            if np.any(used + c > budget):
                break
            used += c
        keep -= 1
    keep = int(np.sum(lam[:keep] > 0))
    return V[:, :keep] * np.sqrt(lam[:keep])


def rank_reduce(blocks, constraints, tol=RANK_TOL):
    """Reduce PSD blocks to rank one while holding every functional fixed.

    Parameters
    ----------
    blocks : list of ndarray
        Hermitian PSD solution blocks.
    constraints : list of list
        One entry per functional; each is a block-aligned list of Hermitian
        coefficient matrices (``None`` where a block does not appear). The
        value ``sum_b Re Tr(F_b X_b)`` of each is preserved.

    Returns
    -------
    RankReduction
    """
    blocks = [np.asarray(B) for B in blocks]
    budget = DROP_TOL * np.array([max(1.0, sum(abs(np.real(np.trace(F @ blocks[b])))
                                             for b, F in enumerate(row) if F is not None))
                                  for row in constraints])
    coeffs = [[row[b] for row in constraints] for b in range(len(blocks))]
    Vs = [_factor_block(B, coeffs[b], budget, tol) for b, B in enumerate(blocks)]
    initial = [V.shape[1] for V in Vs]
    limit = sum(initial)
    it = 0
    while any(V.shape[1] > 1 for V in Vs):
        if it >= limit:
            raise NumericalFailure("rank reduction did not terminate")
        step = None
        for include_rank_one in (False, True):
            active = [b for b, V in enumerate(Vs)
                      if V.shape[1] >= (1 if include_rank_one else 2)]
            cols, bases = [], []
            for b in active:
                r = Vs[b].shape[1]
                E = _herm_basis(r)
                bases.append(E)
                block_cols = np.zeros((len(constraints), len(E)))
                for k, row in enumerate(constraints):
                    F = row[b]
                    if F is None:
                        continue
                    G = Vs[b].conj().T @ F @ Vs[b]
                    block_cols[k] = np.real(np.einsum("ij,pji->p", G, E))
                cols.append(block_cols)
            Amat = np.hstack(cols)
            scale = np.abs(Amat).max() if Amat.size else 0.0
            null = nullspace_real(Amat / scale if scale > 0 else Amat, tol=1e-10)
            if null.shape[1]:
                step = (active, bases, null[:, 0])
                break
        if step is None:
            if sum(V.shape[1] ** 2 for V in Vs) > len(constraints):
                raise NumericalFailure("no nonzero Hermitian direction found")
            break
        active, bases, nvec = step
        Ms, o = {}, 0
        for b, E in zip(active, bases):
            p = len(E)
            Mb = np.einsum("p,pij->ij", nvec[o:o + p], E)
            Ms[b] = 0.5 * (Mb + Mb.conj().T)
            o += p
        eigs = np.concatenate([np.linalg.eigvalsh(Mb) for Mb in Ms.values()])
        amax = np.abs(eigs).max()
        cand = eigs[np.abs(eigs) >= amax * (1 - 1e-12)]
        rho = cand.max() if np.any(cand > 0) else cand.min()
        for b, Mb in Ms.items():
            V = Vs[b]
            Xn = V @ (np.eye(V.shape[1]) - Mb / rho) @ V.conj().T
            Vs[b] = _factor_block(0.5 * (Xn + Xn.conj().T), coeffs[b], budget, tol)
        it += 1
    out = [V @ V.conj().T for V in Vs]
    return RankReduction(blocks=out, iterations=it, initial_ranks=initial,
                         ranks=[V.shape[1] for V in Vs])


def reduce_solution(spec, sol, tol=RANK_TOL):
    """Rank-one version of a Charnes-Cooper solution with the same ``z``."""
    names = spec.names
    rr = rank_reduce([sol.scaled[nm] for nm in names], spec.scaled_functionals(), tol)
    scaled = dict(zip(names, rr.blocks))
    blocks = {nm: B / sol.z for nm, B in scaled.items()}
    obj = sum(np.real(np.trace(F @ scaled[nm])) for nm, F in spec.numerator.items())
    return CharnesCooperSolution(scaled=scaled, z=sol.z, blocks=blocks, objective=float(obj),
                                 iterations=sol.iterations, reduction_iterations=rr.iterations), rr


def top_vector(X, tol=RANK_TOL):
    """``sqrt(lambda_1) v_1`` of a (numerically) rank-one PSD block."""
    lam, V, _ = hermitian_eig(X, tol)
    if lam[0] <= 0:
        return np.zeros(X.shape[0], complex)
    return np.sqrt(lam[0]) * V[:, 0]
