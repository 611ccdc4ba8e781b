"""Closed-form DF designs on a hand-built instance, checked against the SDP route.

All broadcast channels equal e1, noise 1, P_C = 10 and both PUs need
SINR 1. DF-XOR splits the budget as |q|^2 = 4.5 and |w|^2 = 5.5; DF-SUP
gives |q|^2 = 8/3 and |w_A|^2 = |w_B|^2 = 11/3. Forcing the generic SDP
path over the full antenna basis reaches the same SU SINR.
"""

import numpy as np

from cogrelay.channel import NetworkRealization, SystemParams
from cogrelay.strategies import RateRequirements, basis_from_matrix, design_dfsup, design_dfxor


def unit_instance(M=2, P_C=10.0):
    e1 = np.eye(M, dtype=complex)[0]
    return NetworkRealization(h_A=e1, h_B=e1, g_A=e1, g_B=e1, g_D=e1, h_AD=1.0, h_BD=1.0,
                              params=SystemParams(M=M, P_C=P_C))


def main():
    real = unit_instance()
    reqs = RateRequirements(0.5, 0.5)   # 2^(2 * 0.5) - 1 = 1 for both PUs
    I = basis_from_matrix(real, np.eye(real.M))

    x = design_dfxor(real, reqs)
    x_num = design_dfxor(real, reqs, basis=I, force_numeric=True)
    print(f"DF-XOR  [{x.path}]  |q|^2={np.linalg.norm(x.q) ** 2:.12f}  "
          f"|w|^2={np.linalg.norm(x.w) ** 2:.12f}  SU SINR={x.su_sinr:.9f}")
    print(f"DF-XOR  [{x_num.path}]  SU SINR={x_num.su_sinr:.9f}")

    s = design_dfsup(real, reqs)
    s_num = design_dfsup(real, reqs, basis=I, force_numeric=True)
    print(f"DF-SUP  [{s.path}]  |q|^2={np.linalg.norm(s.q) ** 2:.12f}  "
          f"|w_A|^2={np.linalg.norm(s.w_A) ** 2:.12f}  |w_B|^2={np.linalg.norm(s.w_B) ** 2:.12f}")
    print(f"DF-SUP  [{s_num.path}]  SU SINR={s_num.su_sinr:.9f} vs {s.su_sinr:.9f}")

    # with D able to cancel both PU streams the relay beams stop hurting the SU
    c = design_dfsup(real, reqs, canceled="both")
    print(f"DF-SUP both canceled [{c.path}]  SU SINR={c.su_sinr:.9f}")


if __name__ == "__main__":
    main()
