"""Decode-and-forward with superposition coding.

C re-encodes the two PU messages as separate streams: ``w_A`` carries A's
message (for B) and ``w_B`` carries B's message (for A). PU ``i`` needs
``tau_i = 2^(2 R_other) - 1``. D may have cancelled none, one or both PU
streams depending on what it decoded in phase 1.
"""

import numpy as np

from ..fracrank import FractionalSdpSpec, Infeasible
from ..numkernel import hermitian_eig, inv_sqrt_psd
from .common import (DecodeIndicators, build_basis, infeasible, parse_canceled, row_gram,
                     safe_ratio, solve_rank_one)
from .rates import finalize

STRATEGY = "DF-SUP"


def _check_canceled(canceled, indicators):
    if indicators is None:
        return
    bad = canceled - indicators.decoded
    if bad:
        raise ValueError(f"cannot cancel {sorted(bad)}: not decoded at D in phase 1")


def _design(real, canceled, ind, path):
    d = infeasible(STRATEGY, real.params.P_C, canceled=canceled, indicators=ind, path=path)
    d.feasible = True
    return d


def _finish(design, real, reqs):
    return finalize(design, real, {"A": reqs.tau_A, "B": reqs.tau_B})


def closed_form_collinear(real, reqs, u1):
    """Power split along ``u1`` when no stream (or one) is cancelled and N = 1.

    Returns ``(q, w_A, w_B)`` or ``None`` when the budget residue is not positive.
    """
    p = real.params
    tauA, tauB = reqs.tau_A, reqs.tau_B
    tA = abs(real.g_A @ u1) ** 2
    tB = abs(real.g_B @ u1) ** 2
    eA = tauA * safe_ratio(p.sigma2_A, tA) if tauA > 0 else 0.0
    eB = tauB * safe_ratio(p.sigma2_B, tB) if tauB > 0 else 0.0
    residue = p.P_C - eA - eB
    if not residue > 0:
        return None
    q = residue / (tauA + tauB + 1)
    return q, q * tauB + eB, q * tauA + eA


def _both_canceled_terms(real, reqs):
    p = real.params
    nA = np.vdot(real.g_A, real.g_A).real
    nB = np.vdot(real.g_B, real.g_B).real
    cA = reqs.tau_A / nA if reqs.tau_A > 0 else 0.0
    cB = reqs.tau_B / nB if reqs.tau_B > 0 else 0.0
    residue = p.P_C - cA * p.sigma2_A - cB * p.sigma2_B
    return nA, nB, cA, cB, residue


def closed_form_both_canceled(real, reqs, basis):
    """Optimum when D cancels both PU streams (any N).

    ``w_A`` is matched to ``g_B*`` and ``w_B`` to ``g_A*``; ``q`` solves a
    generalized Rayleigh quotient. Returns ``(q, w_A, w_B)`` with ``q`` in
    basis coordinates, or ``None`` when the residue is not positive.
    """
    tauA, tauB = reqs.tau_A, reqs.tau_B
    p = real.params
    if (tauA > 0 and not np.any(real.g_A)) or (tauB > 0 and not np.any(real.g_B)):
        return None
    nA, nB, cA, cB, residue = _both_canceled_terms(real, reqs)
    if not residue > 0:
        return None
    C = row_gram(basis.t_D)
    D = cA * row_gram(basis.t_A) + cB * row_gram(basis.t_B) + np.eye(basis.N)
    Dih = inv_sqrt_psd(D)
    _, V, _ = hermitian_eig(Dih @ C @ Dih)
    q = np.sqrt(residue) * (Dih @ V[:, 0])
    wA = tauB * (abs(basis.t_B @ q) ** 2 + p.sigma2_B) / nB ** 2 if tauB > 0 else 0.0
    wB = tauA * (abs(basis.t_A @ q) ** 2 + p.sigma2_A) / nA ** 2 if tauA > 0 else 0.0
    return q, wA, wB


def closed_form_both_canceled_collinear(real, reqs, u1):
    """Scalar version of :func:`closed_form_both_canceled` for N = 1."""
    tauA, tauB = reqs.tau_A, reqs.tau_B
    p = real.params
    if (tauA > 0 and not np.any(real.g_A)) or (tauB > 0 and not np.any(real.g_B)):
        return None
    nA, nB, cA, cB, residue = _both_canceled_terms(real, reqs)
    if not residue > 0:
        return None
    tA = abs(real.g_A @ u1) ** 2
    tB = abs(real.g_B @ u1) ** 2
    q = residue / (cA * tA + cB * tB + 1)
    wA = tauB * (q * tB + p.sigma2_B) / nB ** 2 if tauB > 0 else 0.0
    wB = tauA * (q * tA + p.sigma2_A) / nA ** 2 if tauA > 0 else 0.0
    return q, wA, wB


def dfsup_fractional_spec(real, reqs, basis, canceled=frozenset()):
    """Relaxed problem over ``WA``, ``WB`` and ``X = q q^H`` in basis coordinates."""
    p = real.params
    N = basis.N
    T_D = row_gram(basis.t_D)
    den = {}
    if "A" not in canceled:
        den["WA"] = T_D
    if "B" not in canceled:
        den["WB"] = T_D
    constraints = []
    if reqs.tau_A > 0:
        T = row_gram(basis.t_A)
        constraints.append(({"WB": T / reqs.tau_A, "X": -T}, p.sigma2_A))
    if reqs.tau_B > 0:
        T = row_gram(basis.t_B)
        constraints.append(({"WA": T / reqs.tau_B, "X": -T}, p.sigma2_B))
    I = np.eye(N)
    return FractionalSdpSpec(
        blocks={"WA": N, "WB": N, "X": N},
        numerator={"X": T_D},
        denominator=den,
        denominator_const=p.sigma2_D,
        constraints=constraints,
        power={"WA": I, "WB": I, "X": I},
        budget=p.P_C,
    )


def design_dfsup(real, reqs, canceled="none", indicators=None, basis=None,
                 force_numeric=False, tol=1e-8):
    """Optimal DF-SUP beamformers ``(w_A, w_B, q)``.

    Parameters
    ----------
    real : NetworkRealization
    reqs : RateRequirements
    canceled : {"none", "A", "B", "both"} or iterable of "A"/"B"
        PU streams D removes before decoding the SU signal.
    indicators : DecodeIndicators, optional
        When given, ``canceled`` must be a subset of the decoded PUs.
    basis : BasisU, optional
        Override of the span basis.
    force_numeric : bool
        Skip the closed forms and use the SDP route.

    Returns
    -------
    PrecoderDesign
    """
    canceled = parse_canceled(canceled)
    _check_canceled(canceled, indicators)
    ind = indicators if indicators is not None else DecodeIndicators(
        a_A=0 if "A" in canceled else 1, a_B=0 if "B" in canceled else 1)
    p = real.params
    M = p.M
    fail = infeasible(STRATEGY, p.P_C, canceled=canceled, indicators=ind)

    if reqs.tau_A <= 0 and reqs.tau_B <= 0:
        gD = real.g_D
        nrm = np.linalg.norm(gD)
        u = gD.conj() / nrm if nrm > 0 else np.eye(M, dtype=complex)[:, 0]
        d = _design(real, canceled, ind, "ClosedForm")
        d.q = np.sqrt(p.P_C) * u
        d.w_A = np.zeros(M, complex)
        d.w_B = np.zeros(M, complex)
        return _finish(d, real, reqs)

    b = basis if basis is not None else build_basis(real)
    if not force_numeric and (b.N == 1 or canceled == {"A", "B"}):
        fail.path = "ClosedForm"
        if canceled == {"A", "B"}:
            if b.N == 1:
                u1 = b.U[:, 0]
                cf = closed_form_both_canceled_collinear(real, reqs, u1)
                if cf is None:
                    return fail
                q, wA, wB = cf
                qv = np.sqrt(q) * u1
            else:
                cf = closed_form_both_canceled(real, reqs, b)
                if cf is None:
                    return fail
                q, wA, wB = cf
                qv = b.U @ q
            wAv = np.sqrt(wA) * real.g_B.conj()
            wBv = np.sqrt(wB) * real.g_A.conj()
        else:
            u1 = b.U[:, 0]
            cf = closed_form_collinear(real, reqs, u1)
            if cf is None:
                return fail
            q, wA, wB = cf
            qv, wAv, wBv = np.sqrt(q) * u1, np.sqrt(wA) * u1, np.sqrt(wB) * u1
        d = _design(real, canceled, ind, "ClosedForm")
        d.q, d.w_A, d.w_B = qv, wAv, wBv
        d = _finish(d, real, reqs)
        d.objective = d.su_sinr
        return d

    spec = dfsup_fractional_spec(real, reqs, b, canceled)
    try:
        vecs, sol, red = solve_rank_one(spec, tol=tol)
    except Infeasible:
        fail.path = "SDP"
        return fail
    d = _design(real, canceled, ind, "SDP")
    d.q, d.w_A, d.w_B = b.U @ vecs["X"], b.U @ vecs["WA"], b.U @ vecs["WB"]
    d.objective = sol.objective
    d.iterations = sol.iterations
    d.reduction_iterations = red.reduction_iterations
    return _finish(d, real, reqs)
