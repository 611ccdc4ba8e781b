"""Fixed-seed oracle checks of the closed forms, the SDP route and rank reduction."""

from dataclasses import dataclass

import numpy as np

from .channel import NetworkRealization, SystemParams, draw_realization, make_geometry, trial_rng
from .fracrank import bisection_oracle, reduce_solution, solve_fractional
from .strategies import (RateRequirements, af_fractional_spec, basis_from_matrix, build_basis,
                         design_dfsup, design_dfxor, DecodeIndicators)


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.measured) and self.measured <= self.tolerance)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<44s} measured={self.measured:.3e}  tol={self.tolerance:.1e}"


def collinear_realization(M, rng, P_C=10.0):
    """Realization whose broadcast channels are all parallel."""
    u = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    u /= np.linalg.norm(u)
    scale = lambda: (rng.standard_normal() + 1j * rng.standard_normal()) * rng.uniform(0.7, 2.0)  # noqa: E731
    cn = lambda: rng.standard_normal(M) + 1j * rng.standard_normal(M)  # noqa: E731
    return NetworkRealization(
        h_A=cn(), h_B=cn(), g_A=scale() * u, g_B=scale() * u, g_D=scale() * u,
        h_AD=1.0, h_BD=1.0, params=SystemParams(M=M, P_C=P_C))


def _unit_instance():
    e = np.eye(2, dtype=complex)[0]
    return NetworkRealization(h_A=e, h_B=e, g_A=e, g_B=e, g_D=e, h_AD=1.0, h_BD=1.0,
                              params=SystemParams(M=2, P_C=10.0))


def check_closed_forms():
    real = _unit_instance()
    reqs = RateRequirements(0.5, 0.5)
    x = design_dfxor(real, reqs)
    s = design_dfsup(real, reqs)
    err_x = max(abs(np.linalg.norm(x.q) ** 2 - 4.5), abs(np.linalg.norm(x.w) ** 2 - 5.5))
    err_s = max(abs(np.linalg.norm(s.q) ** 2 - 8 / 3), abs(np.linalg.norm(s.w_A) ** 2 - 11 / 3),
                abs(np.linalg.norm(s.w_B) ** 2 - 11 / 3))
    return [Check("DF-XOR collinear closed form", err_x, 1e-12),
            Check("DF-SUP collinear closed form", err_s, 1e-12)]


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-12)


def check_closed_vs_numeric(seed=7, n=6):
    rng = np.random.default_rng(seed)
    reqs = RateRequirements(0.4, 0.6)
    worst = {"DF-XOR": 0.0, "DF-SUP": 0.0}
    for k in range(n):
        real = collinear_realization(2 + k % 3, rng)
        I = basis_from_matrix(real, np.eye(real.M))
        pairs = [("DF-XOR", design_dfxor(real, reqs),
                  design_dfxor(real, reqs, basis=I, force_numeric=True)),
                 ("DF-SUP", design_dfsup(real, reqs),
                  design_dfsup(real, reqs, basis=I, force_numeric=True))]
        for name, cf, num in pairs:
            if cf.feasible != num.feasible:
                worst[name] = np.inf
            elif cf.feasible:
                worst[name] = max(worst[name], _rel(num.su_sinr, cf.su_sinr))
    return [Check(f"{k} closed form vs SDP", v, 1e-5) for k, v in worst.items()]


def check_ic_socp(seed=11, n=4):
    reqs = RateRequirements(0.5, 0.5)
    geo = make_geometry(0.5)
    worst = 0.0
    for k in range(n):
        real = draw_realization(geo, SystemParams(M=3, P_C=10.0), trial_rng(seed, k))
        ind = DecodeIndicators(0, 0)
        a = design_dfxor(real, reqs, ic=True, indicators=ind)
        b = design_dfxor(real, reqs, ic=True, indicators=ind, force_numeric=True)
        worst = max(worst, _rel(a.su_sinr, b.su_sinr) if a.feasible == b.feasible else np.inf)
    return [Check("DF-XOR IC: SOCP vs SDP", worst, 1e-5)]


def check_af_oracles(seed=3, n=4):
    reqs = RateRequirements(0.5, 0.5)
    geo = make_geometry(0.5)
    worst_obj, worst_red = 0.0, 0.0
    for k in range(n):
        real = draw_realization(geo, SystemParams(M=2, P_C=10.0), trial_rng(seed, k))
        spec = af_fractional_spec(real, reqs, DecodeIndicators(), build_basis(real))
        sol = solve_fractional(spec)
        ref = bisection_oracle(spec)
        worst_obj = max(worst_obj, _rel(sol.objective, ref))
        red, _ = reduce_solution(spec, sol)
        before = spec.functional_values(sol.scaled)
        after = spec.functional_values(red.scaled)
        scale = spec.functional_scales(sol.scaled)
        worst_red = max(worst_red, float(np.max(np.abs(after - before) / scale)),
                        _rel(red.objective, sol.objective))
    return [Check("AF Charnes-Cooper vs bisection", worst_obj, 1e-5),
            Check("AF rank reduction preserves functionals", worst_red, 1e-7)]


def run_selftest():
    """Run every check; returns the list of :class:`Check` results.

    A check that raises is reported as a single failed entry.
    """
    checks = []
    for fn in (check_closed_forms, check_closed_vs_numeric, check_ic_socp, check_af_oracles):
        try:
            checks.extend(fn())
        except Exception as exc:  # noqa: BLE001
            name = fn.__name__.removeprefix("check_").replace("_", " ")
            checks.append(Check(f"{name} ({type(exc).__name__})", float("inf"), 0.0))
    return checks
