"""Network geometry, path loss and Rayleigh-faded channel draws.

Node coordinates: A=(0, 0), B=(d_AB, 0), C=(d_AC, 0) on the A-B segment,
and the secondary receiver D=(d_AB/2, 0.5) on the perpendicular bisector.
"""

from dataclasses import dataclass, replace

import numpy as np

D_HEIGHT = 0.5


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def path_gain(d, c=1.0, n=3.0):
    """Mean power gain ``c * d**-n`` of a link of length ``d``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    g = c * d ** (-n)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class Geometry:
    d_AB: float
    d_AC: float
    d_BC: float
    d_CD: float
    d_AD: float
    d_BD: float


def make_geometry(d_AC, d_AB=1.0):
    if not 0 < d_AC < d_AB:
        raise ValueError(f"d_AC must lie in (0, d_AB), got {d_AC}")
    half = d_AB / 2.0
    return Geometry(
        d_AB=float(d_AB),
        d_AC=float(d_AC),
        d_BC=float(d_AB - d_AC),
        d_CD=float(np.hypot(half - d_AC, D_HEIGHT)),
        d_AD=float(np.hypot(half, D_HEIGHT)),
        d_BD=float(np.hypot(half, D_HEIGHT)),
    )


@dataclass(frozen=True)
class SystemParams:
    """Antenna count, linear powers and noise variances."""

    M: int = 4
    P_A: float = 10 ** 0.5
    P_B: float = 10 ** 0.5
    P_C: float = 10 ** 0.5
    sigma2_A: float = 1.0
    sigma2_B: float = 1.0
    sigma2_C: float = 1.0
    sigma2_D: float = 1.0
    c: float = 1.0
    n: float = 3.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError("M must be a positive integer")
        for name in ("P_A", "P_B", "sigma2_A", "sigma2_B", "sigma2_C", "sigma2_D"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.P_C < 0:
            raise ValueError("P_C must be nonnegative")
        if not self.n > 0:
            raise ValueError("path-loss exponent must be positive")


@dataclass(frozen=True)
class NetworkRealization:
    """One draw of every channel, plus the parameters it was drawn under.

    ``g_*`` are the C->node vectors as they appear in ``g^T x``; ``h_AD``
    and ``h_BD`` are the phase-1 scalars overheard by D.
    """

    h_A: np.ndarray
    h_B: np.ndarray
    g_A: np.ndarray
    g_B: np.ndarray
    g_D: np.ndarray
    h_AD: complex
    h_BD: complex
    params: SystemParams

    @property
    def M(self):
        return self.params.M

    def with_params(self, **kw):
        return replace(self, params=replace(self.params, **kw))

    def swapped(self):
        """Relabel A <-> B."""
        p = self.params
        return NetworkRealization(
            h_A=self.h_B, h_B=self.h_A, g_A=self.g_B, g_B=self.g_A, g_D=self.g_D,
            h_AD=self.h_BD, h_BD=self.h_AD,
            params=replace(p, P_A=p.P_B, P_B=p.P_A, sigma2_A=p.sigma2_B,
                           sigma2_B=p.sigma2_A))


def trial_rng(seed, trial):
    """Counter-based generator keyed by ``(seed, trial)``."""
    ss = np.random.SeedSequence([int(seed), int(trial)])
    return np.random.Generator(np.random.Philox(ss))


def _cn(rng, size, var):
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return z * np.sqrt(var / 2.0)


def draw_realization(geometry, params, rng):
    """Independent CN(0, path_gain) entries on every link.

    Draw order is fixed (h_A, h_B, g_A, g_B, g_D, h_AD, h_BD) so two
    geometries fed the same stream share their underlying normals.
    """
    M, c, n = params.M, params.c, params.n
    gain = lambda d: path_gain(d, c, n)  # noqa: E731
    h_A = _cn(rng, M, gain(geometry.d_AC))
    h_B = _cn(rng, M, gain(geometry.d_BC))
    g_A = _cn(rng, M, gain(geometry.d_AC))
    g_B = _cn(rng, M, gain(geometry.d_BC))
    g_D = _cn(rng, M, gain(geometry.d_CD))
    h_AD = complex(_cn(rng, 1, gain(geometry.d_AD))[0])
    h_BD = complex(_cn(rng, 1, gain(geometry.d_BD))[0])
    return NetworkRealization(h_A, h_B, g_A, g_B, g_D, h_AD, h_BD, params)
