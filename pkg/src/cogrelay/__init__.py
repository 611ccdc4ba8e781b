"""Optimal linear transceivers for a cognitive two-way relay network.

A secondary transmitter C relays the traffic of two primary users A and B
(amplify-and-forward, or decode-and-forward with XOR or superposition
coding) and in exchange sends its own signal to a secondary receiver D.
The designers here maximize D's SINR subject to the primary rate targets
and C's power budget; :mod:`cogrelay.simkit` evaluates them by Monte Carlo.
"""

from .channel import (Geometry, NetworkRealization, SystemParams, draw_realization,
                      make_geometry, path_gain, trial_rng)
from .conic import ConeProgram, ConeSolution, Status, solve
from .fracrank import (FractionalSdpSpec, Infeasible, NumericalFailure, bisection_oracle,
                       rank_reduce, solve_fractional)
from .simkit import SimConfig, aggregate, run_sweep, run_trial
from .strategies import (DecodeIndicators, PrecoderDesign, RateRequirements, build_basis,
                         design_af, design_dfsup, design_dfxor, evaluate_rates,
                         mac_region_check, sic_decode_indicators)

__version__ = "0.1.0"
