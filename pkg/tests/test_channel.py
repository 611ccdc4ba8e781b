import numpy as np
import pytest

from cogrelay.channel import (SystemParams, db_to_linear, draw_realization, make_geometry,
                              path_gain, trial_rng)


@pytest.mark.parametrize("d, expected", [(1.0, 1.0), (0.5, 8.0), (0.25, 64.0)])
def test_path_gain(d, expected):
    assert path_gain(d, 1.0, 3.0) == pytest.approx(expected)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_gain_rejects_nonpositive(d):
    with pytest.raises(ValueError):
        path_gain(d)


def test_geometry_midpoint():
    g = make_geometry(0.5)
    assert g.d_CD == pytest.approx(0.5)
    assert g.d_BC == pytest.approx(0.5)
    assert g.d_AD == pytest.approx(np.sqrt(0.5), abs=1e-5)
    assert g.d_BD == pytest.approx(0.70711, abs=1e-5)


def test_geometry_off_center():
    g = make_geometry(0.2)
    assert g.d_CD == pytest.approx(np.sqrt(0.34))
    assert g.d_CD == pytest.approx(0.58310, abs=1e-5)
    assert g.d_BC == pytest.approx(0.8)


@pytest.mark.parametrize("d_AC", [0.0, 1.0, 1.5, -0.1])
def test_geometry_range(d_AC):
    with pytest.raises(ValueError):
        make_geometry(d_AC)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(M=0)
    with pytest.raises(ValueError):
        SystemParams(sigma2_D=0.0)
    with pytest.raises(ValueError):
        SystemParams(P_C=-1.0)
    with pytest.raises(ValueError):
        SystemParams(n=0.0)


def test_db_conversion():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(5.0) == pytest.approx(10 ** 0.5)


def test_draw_is_deterministic():
    geo, par = make_geometry(0.5), SystemParams(M=4)
    a = draw_realization(geo, par, trial_rng(7, 3))
    b = draw_realization(geo, par, trial_rng(7, 3))
    for f in ("h_A", "h_B", "g_A", "g_B", "g_D"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    assert a.h_AD == b.h_AD and a.h_BD == b.h_BD
    c = draw_realization(geo, par, trial_rng(7, 4))
    assert not np.array_equal(a.h_A, c.h_A)


def test_draw_dimensions():
    r = draw_realization(make_geometry(0.5), SystemParams(M=1), trial_rng(0, 0))
    for f in ("h_A", "h_B", "g_A", "g_B", "g_D"):
        assert getattr(r, f).shape == (1,)
    assert isinstance(r.h_AD, complex)


def test_second_moments_match_path_gain():
    geo = make_geometry(0.3)
    par = SystemParams(M=1)
    rng = trial_rng(2024, 0)
    n = 100_000
    acc = {k: 0.0 for k in ("h_A", "h_B", "g_A", "g_B", "g_D", "h_AD", "h_BD")}
    # draw in bulk by reusing the per-link generator directly
    from cogrelay.channel import _cn
    links = {"h_A": geo.d_AC, "h_B": geo.d_BC, "g_A": geo.d_AC, "g_B": geo.d_BC,
             "g_D": geo.d_CD, "h_AD": geo.d_AD, "h_BD": geo.d_BD}
    for k, d in links.items():
        z = _cn(rng, n, path_gain(d))
        acc[k] = np.mean(np.abs(z) ** 2) / path_gain(d)
        assert acc[k] == pytest.approx(1.0, rel=0.03), k
        assert abs(np.mean(z)) < 0.02 * np.sqrt(path_gain(d))


def test_entry_moment_through_draw_realization():
    geo, par = make_geometry(0.5), SystemParams(M=4)
    vals = np.concatenate([draw_realization(geo, par, trial_rng(5, t)).h_A
                           for t in range(25_000)])
    assert np.mean(np.abs(vals) ** 2) == pytest.approx(8.0, rel=0.03)


def test_swapped_relabels():
    r = draw_realization(make_geometry(0.3), SystemParams(M=2), trial_rng(1, 1))
    s = r.swapped()
    assert np.array_equal(s.h_A, r.h_B) and np.array_equal(s.g_B, r.g_A)
    assert s.h_AD == r.h_BD
