"""Achieved SINRs and rates of a design on a realization."""

from dataclasses import dataclass

import numpy as np

from ..fracrank import NumericalFailure
from .common import rate

# Largest relative constraint violation accepted as solver round-off
MAX_VIOLATION = 1e-4


@dataclass
class RateReport:
    su_sinr: float
    su_rate: float
    pu_sinr: dict
    pu_rate: dict


def _af_sinrs(W, q, real, ind):
    p = real.params
    g = {"A": real.g_A, "B": real.g_B}
    h = {"A": real.h_A, "B": real.h_B}
    P = {"A": p.P_A, "B": p.P_B}
    s2 = {"A": p.sigma2_A, "B": p.sigma2_B}
    other = {"A": "B", "B": "A"}
    pu = {}
    for i in ("A", "B"):
        gW = g[i] @ W
        j = other[i]
        num = P[j] * abs(gW @ h[j]) ** 2
        den = abs(g[i] @ q) ** 2 + p.sigma2_C * np.vdot(gW, gW).real + s2[i]
        pu[i] = num / den
    gW = real.g_D @ W
    den = (ind.a_A * p.P_A * abs(gW @ real.h_A) ** 2
           + ind.a_B * p.P_B * abs(gW @ real.h_B) ** 2
           + p.sigma2_C * np.vdot(gW, gW).real + p.sigma2_D)
    return abs(real.g_D @ q) ** 2 / den, pu


def _dfxor_sinrs(w, q, real, ic):
    p = real.params
    pu = {}
    for i, g, s2 in (("A", real.g_A, p.sigma2_A), ("B", real.g_B, p.sigma2_B)):
        pu[i] = abs(g @ w) ** 2 / (abs(g @ q) ** 2 + s2)
    interf = 0.0 if ic else abs(real.g_D @ w) ** 2
    return abs(real.g_D @ q) ** 2 / (interf + p.sigma2_D), pu


def _dfsup_sinrs(w_A, w_B, q, real, canceled):
    p = real.params
    pu = {
        "A": abs(real.g_A @ w_B) ** 2 / (abs(real.g_A @ q) ** 2 + p.sigma2_A),
        "B": abs(real.g_B @ w_A) ** 2 / (abs(real.g_B @ q) ** 2 + p.sigma2_B),
    }
    interf = 0.0
    if "A" not in canceled:
        interf += abs(real.g_D @ w_A) ** 2
    if "B" not in canceled:
        interf += abs(real.g_D @ w_B) ** 2
    return abs(real.g_D @ q) ** 2 / (interf + p.sigma2_D), pu


def sinrs(design, real, indicators=None):
    """``(su_sinr, {"A": ..., "B": ...})`` recomputed from the beamformers."""
    if design.strategy == "AF":
        ind = indicators if indicators is not None else design.indicators
        return _af_sinrs(design.W, design.q, real, ind)
    if design.strategy == "DF-XOR":
        return _dfxor_sinrs(design.w, design.q, real, design.ic)
    if design.strategy == "DF-SUP":
        return _dfsup_sinrs(design.w_A, design.w_B, design.q, real, design.canceled)
    raise ValueError(f"unknown strategy {design.strategy!r}")


def evaluate_rates(design, real, indicators=None):
    """Two-phase rates ``0.5 log2(1 + SINR)`` for the SU and both PUs."""
    if not design.feasible:
        raise ValueError("cannot evaluate an infeasible design")
    su, pu = sinrs(design, real, indicators)
    return RateReport(su_sinr=float(su), su_rate=rate(su),
                      pu_sinr={k: float(v) for k, v in pu.items()},
                      pu_rate={k: rate(v) for k, v in pu.items()})


def relay_power(design, real):
    """Power C spends forwarding primary traffic."""
    if design.strategy == "AF":
        p, W = real.params, design.W
        return float(p.P_A * np.linalg.norm(W @ real.h_A) ** 2
                     + p.P_B * np.linalg.norm(W @ real.h_B) ** 2
                     + p.sigma2_C * np.linalg.norm(W) ** 2)
    if design.strategy == "DF-XOR":
        return float(np.linalg.norm(design.w) ** 2)
    return float(np.linalg.norm(design.w_A) ** 2 + np.linalg.norm(design.w_B) ** 2)


def finalize(design, real, thresholds):
    """Fill achieved SINRs, rates and power split into ``design``.

    The SU beam is first shrunk by the smallest factor that makes every
    PU SINR meet ``thresholds`` and the budget hold exactly; on numerically
    solved paths this only strips solver round-off. A design whose PU SINRs
    or budget are off by more than ``MAX_VIOLATION`` (relative) is wrong,
    not noisy, and raises :class:`~cogrelay.fracrank.NumericalFailure`
    instead of being repaired.
    """
    q = design.q
    relay = relay_power(design, real)
    su_pow = float(np.linalg.norm(q) ** 2)
    _, f1 = sinrs(design, real)
    design.q = np.zeros_like(q)
    _, f0 = sinrs(design, real)
    design.q = q
    viol = (relay + su_pow - design.P_C) / max(design.P_C, 1e-300)
    s2 = 1.0
    for i in ("A", "B"):
        tau = thresholds[i]
        if tau <= 0 or f1[i] >= tau:
            continue
        viol = max(viol, (tau - f1[i]) / tau)
        inv1, inv0 = 1 / max(f1[i], 1e-300), 1 / max(f0[i], 1e-300)
        if inv1 > inv0:
            s2 = min(s2, (1 / tau - inv0) / (inv1 - inv0))
    if su_pow > 0 and relay + su_pow > design.P_C:
        s2 = min(s2, (design.P_C - relay) / su_pow)
    if viol > MAX_VIOLATION:
        raise NumericalFailure(f"{design.strategy} design violates its constraints "
                               f"by {viol:.2e} (relative)")
    design.q_shrink = float(1.0 - np.sqrt(min(max(s2, 0.0), 1.0)))
    if s2 < 1.0:
        design.q = q * np.sqrt(max(s2, 0.0))
        su_pow = float(np.linalg.norm(design.q) ** 2)
    su, pu = sinrs(design, real)
    design.su_sinr = float(su)
    design.su_rate = rate(su)
    design.pu_sinr = {k: float(v) for k, v in pu.items()}
    design.relay_power = relay
    design.su_power = su_pow
    return design
