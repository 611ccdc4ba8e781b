"""AF design: Charnes-Cooper SDP, a bisection cross-check and rank reduction.

The AF relay matrix and SU beam are found from a linear-fractional SDP.
The same relaxed problem is solved twice, once through the Charnes-Cooper
change of variables and once by bisection on the ratio, and the high-rank
solution produced on an orthogonal-channel instance is reduced to rank
one while every constraint value is held fixed.
"""

import numpy as np

from cogrelay.channel import NetworkRealization, SystemParams, draw_realization, make_geometry, \
    trial_rng
from cogrelay.fracrank import bisection_oracle, reduce_solution, solve_fractional
from cogrelay.strategies import (RateRequirements, af_fractional_spec, build_basis, design_af,
                                 sic_decode_indicators)


def orthogonal_instance(rng, M=3):
    Q, _ = np.linalg.qr(rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M)))
    cn = lambda: rng.standard_normal(M) + 1j * rng.standard_normal(M)  # noqa: E731
    return NetworkRealization(h_A=cn(), h_B=cn(), g_A=Q[:, 0].conj(), g_B=1.5 * Q[:, 1].conj(),
                              g_D=0.8 * Q[:, 2].conj(), h_AD=1.0, h_BD=1.0,
                              params=SystemParams(M=M, P_C=20.0))


def main():
    reqs = RateRequirements(0.6, 0.4)
    real = draw_realization(make_geometry(0.5), SystemParams(M=3, P_C=10.0), trial_rng(7, 0))
    ind = sic_decode_indicators(real, reqs)
    spec = af_fractional_spec(real, reqs, ind, build_basis(real))
    cc = solve_fractional(spec)
    bis = bisection_oracle(spec)
    print(f"fading draw: Charnes-Cooper {cc.objective:.9f}, bisection {bis:.9f}, "
          f"relative gap {abs(cc.objective - bis) / bis:.1e}")

    d = design_af(real, reqs, ind)
    print(f"AF design: SU SINR {d.su_sinr:.6f}, PU SINRs "
          f"{d.pu_sinr['A']:.6f} / {d.pu_sinr['B']:.6f} (targets {reqs.tau_A:.6f} / "
          f"{reqs.tau_B:.6f}), relay power {d.relay_power:.4f}, SU power {d.su_power:.4f}")

    real = orthogonal_instance(np.random.default_rng(3))
    spec = af_fractional_spec(real, reqs, ind, build_basis(real))
    sol = solve_fractional(spec)
    red, rr = reduce_solution(spec, sol)
    drift = np.abs(spec.functional_values(red.scaled) - spec.functional_values(sol.scaled))
    print(f"orthogonal channels: ranks {rr.initial_ranks} -> {rr.ranks} in {rr.iterations} "
          f"step(s); largest functional drift {drift.max():.1e}; objective "
          f"{sol.objective:.9f} -> {red.objective:.9f}")


if __name__ == "__main__":
    main()
