"""Decode-and-forward with XOR network coding.

Both PUs decode the same XORed message, so a single beam ``w`` carries it
and both must reach ``gamma = 2^(2R) - 1`` with ``R = max(R_A, R_B)``.
With interference cancellation (IC) the SU receiver D has already decoded
both PU signals in phase 1 and the XORed stream no longer interferes.
"""

import numpy as np

from .. import conic
from ..conic import SOC, ConeProgram, Free, NonNeg, Status
from ..fracrank import FractionalSdpSpec, Infeasible, NumericalFailure
from ..numkernel import hermitian_eig, inv_sqrt_psd
from .common import (DecodeIndicators, build_basis, infeasible, row_gram, safe_ratio,
                     solve_rank_one)
from .rates import finalize

STRATEGY = "DF-XOR"


def _check_ic(ic, indicators):
    if ic and indicators is not None and (indicators.a_A or indicators.a_B):
        raise ValueError("interference cancellation needs both PU signals decoded at D "
                         f"(got a_A={indicators.a_A}, a_B={indicators.a_B})")


def _finish(design, real, gamma):
    return finalize(design, real, {"A": gamma, "B": gamma})


def _no_demand(real, ic, ind):
    """All power on the SU beam, matched to g_D."""
    p = real.params
    gD = real.g_D
    nrm = np.linalg.norm(gD)
    u = gD.conj() / nrm if nrm > 0 else np.eye(p.M, dtype=complex)[:, 0]
    d = infeasible(STRATEGY, p.P_C, ic=ic, indicators=ind, path="ClosedForm")
    d.feasible = True
    d.q = np.sqrt(p.P_C) * u
    d.w = np.zeros(p.M, complex)
    return d


def closed_form_collinear(real, gamma, u1):
    """Optimal ``(q, w)`` power split when every BC channel is parallel to ``u1``.

    Returns ``None`` when ``P_C <= gamma d`` (the PU targets cannot be met).
    """
    p = real.params
    tA = abs(real.g_A @ u1) ** 2
    tB = abs(real.g_B @ u1) ** 2
    d = max(safe_ratio(p.sigma2_A, tA), safe_ratio(p.sigma2_B, tB))
    if not p.P_C > gamma * d:
        return None
    q = (p.P_C - gamma * d) / (gamma + 1)
    w = gamma * (p.P_C - gamma * d) / (gamma + 1) + gamma * d
    return q, w


def closed_form_pair_collinear(real, gamma, U2):
    """IC optimum when g_A, g_B are parallel to ``U2[:, 0]`` and g_D adds one dimension.

    Returns ``(q, w)`` with ``q`` the 2-vector of coordinates in ``U2``,
    or ``None`` when infeasible.
    """
    p = real.params
    u1 = U2[:, 0]
    # g_i* = c_i u1, so |c_i| = |g_i^T u1|
    cA = abs(real.g_A @ u1)
    cB = abs(real.g_B @ u1)
    d = max(safe_ratio(p.sigma2_A, cA ** 2), safe_ratio(p.sigma2_B, cB ** 2))
    if not p.P_C > gamma * d:
        return None
    a = real.g_D @ U2
    A = np.outer(a.conj(), a)
    b = u1.conj() @ U2
    B = gamma * np.outer(b.conj(), b) + np.eye(2)
    Bih = inv_sqrt_psd(B)
    _, V, _ = hermitian_eig(Bih @ A @ Bih)
    q = np.sqrt(p.P_C - gamma * d) * (Bih @ V[:, 0])
    w = gamma * d + gamma * abs(b @ q) ** 2
    return q, w


def dfxor_fractional_spec(real, gamma, basis, ic=False):
    """Relaxed problem over ``W = w w^H`` and ``X = q q^H`` in basis coordinates."""
    p = real.params
    N = basis.N
    T_D = row_gram(basis.t_D)
    constraints = [({"W": row_gram(basis.t_A) / gamma, "X": -row_gram(basis.t_A)}, p.sigma2_A),
                   ({"W": row_gram(basis.t_B) / gamma, "X": -row_gram(basis.t_B)}, p.sigma2_B)]
    return FractionalSdpSpec(
        blocks={"W": N, "X": N},
        numerator={"X": T_D},
        denominator={} if ic else {"W": T_D},
        denominator_const=p.sigma2_D,
        constraints=constraints,
        power={"W": np.eye(N), "X": np.eye(N)},
        budget=p.P_C,
    )


def ic_socp(real, gamma, basis):
    """Second-order cone form of the IC problem.

    Variables are ``w = (w_A, w_B) >= 0`` weighting ``g_A*`` and the
    phase-aligned ``g_B*``, and the complex coordinates ``q`` of the SU
    beam in ``basis.U``. Returns ``(program, unpack)``.
    """
    p = real.params
    N = basis.N
    gA, gB = real.g_A, real.g_B
    S = np.array([[np.vdot(gA, gA).real, basis.a_A[1]],
                  [basis.a_A[1], np.vdot(gB, gB).real]])
    lam, V = np.linalg.eigh(S)
    L = (V * np.sqrt(np.clip(lam, 0, None))) @ V.T          # L^T L = S
    cones = [NonNeg(2), Free(2 * N), SOC(4), SOC(4), SOC(3 + 2 * N)]
    n = sum(c.dim for c in cones)
    iw, iq, isA, isB, isP = 0, 2, 2 + 2 * N, 6 + 2 * N, 10 + 2 * N
    rows, rhs = [], []

    def add(entries, val):
        r = np.zeros(n)
        for j, v in entries:
            r[j] += v
        rows.append(r)
        rhs.append(val)

    sg = np.sqrt(gamma)
    for base, a, t, s2 in ((isA, basis.a_A, basis.t_A, p.sigma2_A),
                           (isB, basis.a_B, basis.t_B, p.sigma2_B)):
        add([(base, 1.0), (iw, -a[0] / sg), (iw + 1, -a[1] / sg)], 0.0)
        re = [(iq + l, -t[l].real) for l in range(N)] + [(iq + N + l, t[l].imag) for l in range(N)]
        im = [(iq + l, -t[l].imag) for l in range(N)] + [(iq + N + l, -t[l].real) for l in range(N)]
        add([(base + 1, 1.0)] + re, 0.0)
        add([(base + 2, 1.0)] + im, 0.0)
        add([(base + 3, 1.0)], np.sqrt(s2))
    add([(isP, 1.0)], np.sqrt(p.P_C))
    for k in range(2):
        add([(isP + 1 + k, 1.0), (iw, -L[k, 0]), (iw + 1, -L[k, 1])], 0.0)
    for l in range(2 * N):
        add([(isP + 3 + l, 1.0), (iq + l, -1.0)], 0.0)
    c = np.zeros(n)
    c[iq:iq + N] = basis.t_D.real
    c[iq + N:iq + 2 * N] = -basis.t_D.imag
    prog = ConeProgram(c=c, A=np.array(rows), b=np.array(rhs), cones=cones)

    def unpack(x):
        w = np.clip(x[iw:iw + 2], 0, None)
        q = x[iq:iq + N] + 1j * x[iq + N:iq + 2 * N]
        return w, q

    return prog, unpack


def design_dfxor(real, reqs, ic=False, indicators=None, basis=None, force_numeric=False,
                 tol=1e-8):
    """Optimal DF-XOR beamformers ``(w, q)``.

    Parameters
    ----------
    real : NetworkRealization
    reqs : RateRequirements
    ic : bool
        Whether D cancels the XORed PU stream. Only valid when both PU
        signals were decoded at D in phase 1.
    indicators : DecodeIndicators, optional
        Checked against ``ic`` when given.
    basis : BasisU, optional
        Override of the span basis (e.g. the identity, to exercise the
        numeric route on degenerate geometry).
    force_numeric : bool
        Skip the closed forms and use the SDP route.

    Returns
    -------
    PrecoderDesign
        ``feasible=False`` when the PU targets cannot be met.
    """
    _check_ic(ic, indicators)
    ind = indicators if indicators is not None else (DecodeIndicators(0, 0) if ic
                                                     else DecodeIndicators())
    p = real.params
    gamma = reqs.gamma
    if gamma <= 0:
        return _finish(_no_demand(real, ic, ind), real, gamma)
    b = basis if basis is not None else build_basis(real)
    fail = infeasible(STRATEGY, p.P_C, ic=ic, indicators=ind)

    if not force_numeric:
        path = None
        if b.N == 1:
            u1 = b.U[:, 0]
            cf = closed_form_collinear(real, gamma, u1)
            if cf is None:
                fail.path = "ClosedForm"
                return fail
            q, w = cf
            qv, wv = np.sqrt(q) * u1, np.sqrt(w) * u1
            path = "ClosedForm"
        elif ic and b.pair_dim == 1 and b.N == 2:
            U2 = b.U_pair[:, :2]
            cf = closed_form_pair_collinear(real, gamma, U2)
            if cf is None:
                fail.path = "ClosedForm"
                return fail
            q, w = cf
            qv, wv = U2 @ q, np.sqrt(w) * U2[:, 0]
            path = "ClosedForm"
        elif ic and b.pair_dim == 2:
            prog, unpack = ic_socp(real, gamma, b)
            sol = conic.solve(prog, tol=tol)
            if sol.status is Status.PRIMAL_INFEASIBLE:
                fail.path = "SOCP"
                return fail
            if not sol.optimal:
                raise NumericalFailure(f"SOCP ended with {sol.status.value}")
            w, q = unpack(sol.x)
            qv = b.U @ q
            wv = b.G @ w
            d = infeasible(STRATEGY, p.P_C, ic=ic, indicators=ind, path="SOCP")
            d.feasible = True
            d.q, d.w = qv, wv
            d.objective = float(sol.objective) ** 2 / p.sigma2_D
            d.iterations = sol.iterations
            return _finish(d, real, gamma)
        if path is not None:
            d = infeasible(STRATEGY, p.P_C, ic=ic, indicators=ind, path=path)
            d.feasible = True
            d.q, d.w = qv, wv
            d = _finish(d, real, gamma)
            d.objective = d.su_sinr
            return d

    spec = dfxor_fractional_spec(real, gamma, b, ic=ic)
    try:
        vecs, sol, red = solve_rank_one(spec, tol=tol)
    except Infeasible:
        fail.path = "SDP"
        return fail
    d = infeasible(STRATEGY, p.P_C, ic=ic, indicators=ind, path="SDP")
    d.feasible = True
    d.q, d.w = b.U @ vecs["X"], b.U @ vecs["W"]
    d.objective = sol.objective
    d.iterations = sol.iterations
    d.reduction_iterations = red.reduction_iterations
    return _finish(d, real, gamma)
