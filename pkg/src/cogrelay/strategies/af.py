"""Amplify-and-forward: joint relay matrix and secondary beamformer."""

import numpy as np

from ..fracrank import FractionalSdpSpec, Infeasible, reduce_solution, solve_fractional, top_vector
from ..numkernel import unvec
from .common import DecodeIndicators, build_basis, infeasible, outer_conj, row_gram
from .rates import finalize


def af_fractional_spec(real, reqs, indicators, basis=None):
    """Relaxed AF problem over ``X = q q^H`` (N x N) and ``Y = vec(W) vec(W)^H``."""
    p = real.params
    M = p.M
    b = basis if basis is not None else build_basis(real)
    hA, hB = real.h_A, real.h_B
    h = {"A": hA, "B": hB}
    g = {"A": real.g_A, "B": real.g_B}
    P = {"A": p.P_A, "B": p.P_B}
    t = {"A": b.t_A, "B": b.t_B}
    s2 = {"A": p.sigma2_A, "B": p.sigma2_B}
    other = {"A": "B", "B": "A"}
    I_M = np.eye(M)

    R_D = (indicators.a_A * P["A"] * np.outer(hA, hA.conj())
           + indicators.a_B * P["B"] * np.outer(hB, hB.conj()) + p.sigma2_C * I_M)
    Q02 = np.kron(R_D.T, outer_conj(real.g_D))
    constraints = []
    for i in ("A", "B"):
        tau = reqs.tau(i)
        if tau <= 0:
            continue
        j = other[i]
        Q1 = P[j] * np.kron(np.outer(h[j], h[j].conj()).T, outer_conj(g[i]))
        Q3 = p.sigma2_C * np.kron(I_M, outer_conj(g[i]))
        constraints.append(({"Y": Q1 / tau - Q3, "X": -row_gram(t[i])}, s2[i]))
    R_C = P["A"] * np.outer(hA, hA.conj()) + P["B"] * np.outer(hB, hB.conj()) + p.sigma2_C * I_M
    Q = np.kron(R_C.T, I_M)
    return FractionalSdpSpec(
        blocks={"X": b.N, "Y": M * M},
        numerator={"X": row_gram(b.t_D)},
        denominator={"Y": Q02},
        denominator_const=p.sigma2_D,
        constraints=constraints,
        power={"X": np.eye(b.N), "Y": Q},
        budget=p.P_C,
    )


def design_af(real, reqs, indicators=None, basis=None, tol=1e-8):
    """Optimal AF design via Charnes-Cooper SDP and rank-one reduction.

    Returns an infeasible :class:`PrecoderDesign` when the PU targets cannot
    be met; :class:`~cogrelay.fracrank.NumericalFailure` propagates.
    """
    ind = indicators if indicators is not None else DecodeIndicators()
    p = real.params
    b = basis if basis is not None else build_basis(real)
    spec = af_fractional_spec(real, reqs, ind, b)
    try:
        sol = solve_fractional(spec, tol=tol)
    except Infeasible:
        return infeasible("AF", p.P_C, indicators=ind, path="SDP")
    red, _ = reduce_solution(spec, sol)
    q = top_vector(red.blocks["X"])
    w = top_vector(red.blocks["Y"])
    design = infeasible("AF", p.P_C, indicators=ind, path="SDP")
    design.feasible = True
    design.W = unvec(w, p.M, p.M)
    design.q = b.U @ q
    design.objective = sol.objective
    design.iterations = sol.iterations
    design.reduction_iterations = red.reduction_iterations
    return finalize(design, real, {"A": reqs.tau_A, "B": reqs.tau_B})
