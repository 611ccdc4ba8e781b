import numpy as np
import pytest

from cogrelay.channel import NetworkRealization, SystemParams, draw_realization, make_geometry, trial_rng


def unit_realization(M=2, P_C=10.0, gA=None, gB=None, gD=None):
    """Hand-built realization; broadcast channels default to e1."""
    e1 = np.eye(M, dtype=complex)[0]
    return NetworkRealization(
        h_A=e1, h_B=e1,
        g_A=e1 if gA is None else np.asarray(gA, complex),
        g_B=e1 if gB is None else np.asarray(gB, complex),
        g_D=e1 if gD is None else np.asarray(gD, complex),
        h_AD=1.0, h_BD=1.0, params=SystemParams(M=M, P_C=P_C))


def random_realization(M, seed, trial, d_AC=0.5, P_C=10.0):
    params = SystemParams(M=M, P_C=P_C)
    return draw_realization(make_geometry(d_AC), params, trial_rng(seed, trial))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
