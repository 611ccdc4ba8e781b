"""Rate bookkeeping, phase-1 decoding logic and the beamforming basis."""

from dataclasses import dataclass, field

import numpy as np

from ..fracrank import reduce_solution, solve_fractional, top_vector
from ..numkernel import RANK_TOL, orthonormal_basis


@dataclass(frozen=True)
class RateRequirements:
    """End-to-end rate targets of the two primary users (bits/channel use).

    ``tau_A`` is the SINR A needs to receive B's message, hence the index
    swap.
    """

    R_A: float
    R_B: float

    def __post_init__(self):
        if self.R_A < 0 or self.R_B < 0:
            raise ValueError("rate requirements must be nonnegative")

    @property
    def tau_A(self):
        return 2.0 ** (2 * self.R_B) - 1

    @property
    def tau_B(self):
        return 2.0 ** (2 * self.R_A) - 1

    def tau(self, i):
        return self.tau_A if i == "A" else self.tau_B

    @property
    def R(self):
        return max(self.R_A, self.R_B)

    @property
    def gamma(self):
        return 2.0 ** (2 * self.R) - 1

    def swapped(self):
        return RateRequirements(self.R_B, self.R_A)


@dataclass(frozen=True)
class DecodeIndicators:
    """``a_i == 0`` means D decoded PU ``i`` in phase 1 and can cancel it."""

    a_A: int = 1
    a_B: int = 1

    def __post_init__(self):
        if self.a_A not in (0, 1) or self.a_B not in (0, 1):
            raise ValueError("indicators are binary")

    @property
    def decoded(self):
        return frozenset(i for i, a in (("A", self.a_A), ("B", self.a_B)) if a == 0)


def mac_region_check(real, reqs, sum_power_b=False):
    """Whether C can jointly decode both PUs in phase 1.

    The sum-rate bound weights ``h_B h_B^H`` with ``P_A`` as printed in the
    source model; ``sum_power_b=True`` uses ``P_B`` instead.
    """
    p = real.params
    hA, hB = real.h_A, real.h_B
    sA = p.P_A * np.vdot(hA, hA).real / p.sigma2_C
    sB = p.P_B * np.vdot(hB, hB).real / p.sigma2_C
    pb = p.P_B if sum_power_b else p.P_A
    Mx = (np.eye(p.M) + (p.P_A / p.sigma2_C) * np.outer(hA, hA.conj())
          + (pb / p.sigma2_C) * np.outer(hB, hB.conj()))
    sign, logdet = np.linalg.slogdet(Mx)
    sum_cap = logdet / np.log(2)
    eps = 1e-12
    return bool(reqs.R_A <= np.log2(1 + sA) + eps
                and reqs.R_B <= np.log2(1 + sB) + eps
                and reqs.R_A + reqs.R_B <= sum_cap + eps)


def sic_decode_indicators(real, reqs):
    """Stronger-first successive decoding of the overheard PU signals at D.

    On an exact power tie both orders are stronger-first; the one that
    decodes more is used, which keeps the rule symmetric under relabeling.
    """
    p = real.params
    pw = {"A": abs(real.h_AD) ** 2 * p.P_A, "B": abs(real.h_BD) ** 2 * p.P_B}
    rate = {"A": reqs.R_A, "B": reqs.R_B}
    n = p.sigma2_D
    eps = 1e-12

    def run(strong, weak):
        decoded = set()
        if np.log2(1 + pw[strong] / (pw[weak] + n)) >= rate[strong] - eps:
            decoded.add(strong)
            if np.log2(1 + pw[weak] / n) >= rate[weak] - eps:
                decoded.add(weak)
        elif np.log2(1 + pw[weak] / (pw[strong] + n)) >= rate[weak] - eps:
            decoded.add(weak)
        return decoded

    if pw["A"] == pw["B"]:
        decoded = max(run("A", "B"), run("B", "A"), key=len)
    else:
        decoded = run("A", "B") if pw["A"] > pw["B"] else run("B", "A")
    return DecodeIndicators(a_A=0 if "A" in decoded else 1, a_B=0 if "B" in decoded else 1)


@dataclass
class BasisU:
    U: np.ndarray
    N: int
    t_D: np.ndarray
    t_A: np.ndarray
    t_B: np.ndarray
    U_pair: np.ndarray
    pair_dim: int
    theta: float
    G: np.ndarray
    a_A: np.ndarray
    a_B: np.ndarray


def build_basis(real, tol=RANK_TOL):
    """Orthonormal bases of span{g_D*, g_A*, g_B*}.

    ``U`` follows the order (g_D*, g_A*, g_B*); ``U_pair`` follows
    (g_A*, g_B*, g_D*) so its leading ``pair_dim`` columns span
    {g_A*, g_B*}.
    """
    gA, gB, gD = real.g_A, real.g_B, real.g_D
    if not (np.any(gA) or np.any(gB) or np.any(gD)):
        raise ValueError("all broadcast channels are zero")
    U, N = orthonormal_basis([gD.conj(), gA.conj(), gB.conj()], tol)
    U_pair, _ = orthonormal_basis([gA.conj(), gB.conj(), gD.conj()], tol)
    if np.any(gA) or np.any(gB):
        _, pair_dim = orthonormal_basis([gA.conj(), gB.conj()], tol)
    else:
        pair_dim = 0
    c = gA @ gB.conj()
    theta = float(np.angle(c))
    G = np.column_stack([gA.conj(), np.exp(-1j * theta) * gB.conj()])
    a_A = np.array([np.vdot(gA, gA).real, abs(c)])
    a_B = np.array([abs(gB @ gA.conj()), np.vdot(gB, gB).real])
    return BasisU(U=U, N=N, t_D=gD @ U, t_A=gA @ U, t_B=gB @ U, U_pair=U_pair,
                  pair_dim=pair_dim, theta=theta, G=G, a_A=a_A, a_B=a_B)


def basis_from_matrix(real, U):
    """A :class:`BasisU` over a caller-supplied orthonormal ``U``."""
    b = build_basis(real)
    U = np.asarray(U, dtype=complex)
    b.U, b.N = U, U.shape[1]
    b.t_D, b.t_A, b.t_B = real.g_D @ U, real.g_A @ U, real.g_B @ U
    return b


def outer_conj(g):
    """``g* g^T``, the matrix with ``|g^T x|^2 = x^H (g* g^T) x``."""
    g = np.asarray(g)
    return np.outer(g.conj(), g)


def row_gram(t):
    """``t^H t`` for a row vector ``t``."""
    t = np.asarray(t)
    return np.outer(t.conj(), t)


@dataclass
class PrecoderDesign:
    strategy: str
    feasible: bool
    P_C: float
    path: str = None
    W: np.ndarray = None
    q: np.ndarray = None
    w: np.ndarray = None
    w_A: np.ndarray = None
    w_B: np.ndarray = None
    ic: bool = False
    canceled: frozenset = frozenset()
    indicators: DecodeIndicators = None
    su_sinr: float = 0.0
    su_rate: float = 0.0
    pu_sinr: dict = field(default_factory=dict)
    objective: float = np.nan
    relay_power: float = 0.0
    su_power: float = 0.0
    iterations: int = 0
    reduction_iterations: int = 0
    q_shrink: float = 0.0

    @property
    def total_power(self):
        return self.relay_power + self.su_power

    @property
    def power_share(self):
        return self.su_power / self.P_C if self.P_C > 0 else 0.0


def infeasible(strategy, P_C, **kw):
    return PrecoderDesign(strategy=strategy, feasible=False, P_C=P_C, **kw)


def rate(sinr):
    return 0.5 * np.log2(1 + max(sinr, 0.0))


def solve_rank_one(spec, tol=1e-8):
    """Solve a fractional SDP and return rank-one factors of every block.

    Returns ``(vectors, solution, reduced)`` where ``vectors`` maps block
    names to ``x`` with ``X = x x^H``. :class:`~cogrelay.fracrank.Infeasible`
    and :class:`~cogrelay.fracrank.NumericalFailure` propagate.
    """
    sol = solve_fractional(spec, tol=tol)
    red, _ = reduce_solution(spec, sol)
    vecs = {nm: top_vector(B) for nm, B in red.blocks.items()}
    return vecs, sol, red


def parse_canceled(canceled):
    """Normalise ``"none" | "A" | "B" | "both"`` (or an iterable) to a frozenset."""
    if canceled is None:
        return frozenset()
    if isinstance(canceled, str):
        table = {"none": frozenset(), "A": frozenset("A"), "B": frozenset("B"),
                 "both": frozenset("AB")}
        if canceled not in table:
            raise ValueError(f"canceled must be one of none, A, B, both (got {canceled!r})")
        return table[canceled]
    out = frozenset(canceled)
    if not out <= {"A", "B"}:
        raise ValueError("canceled may only contain 'A' and 'B'")
    return out


def safe_ratio(num, den):
    """``num / den`` with ``0/0 = 0`` and ``x/0 = inf`` for ``x > 0``."""
    if num == 0:
        return 0.0
    return num / den if den > 0 else np.inf
