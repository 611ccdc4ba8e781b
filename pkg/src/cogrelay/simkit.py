"""Monte Carlo engine: per-trial designs for every strategy and their aggregation.

Each trial draws one realization from the ``(seed, trial)`` stream and runs
every strategy on it (common random numbers). The same trial indices are
reused at every sweep point, so curves over a sweep share their draws.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .channel import SystemParams, db_to_linear, draw_realization, make_geometry, trial_rng
from .fracrank import NumericalFailure
from .strategies import (STRATEGIES, RateRequirements, design_af, design_dfsup, design_dfxor,
                         evaluate_rates, mac_region_check, sic_decode_indicators)

RATE_MODES = ("conditional", "zero-fill")
SWEEP_PARAMS = ("P_C_dB", "P_dB", "d_AC", "M", "alpha", "K")


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a Monte Carlo run. Powers are in dB."""

    M: int = 4
    d_AC: float = 0.5
    d_AB: float = 1.0
    P_dB: float = 5.0
    P_C_dB: float = 10.0
    sigma2: float = 1.0
    c: float = 1.0
    n: float = 3.0
    alpha: float = 0.5
    K: float = 1.0
    sum_power_b: bool = False
    sweep_param: str = None
    sweep_values: tuple = ()
    trials: int = 200
    seed: int = 0
    threads: int = 1
    strategies: tuple = STRATEGIES
    rate_mode: str = "conditional"
    numfail_budget: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.K < 0:
            raise ValueError(f"K must be nonnegative, got {self.K}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if not 0 < self.d_AC < self.d_AB:
            raise ValueError(f"d_AC must lie in (0, d_AB), got {self.d_AC}")
        if not (self.sigma2 > 0 and self.c > 0 and self.n > 0 and self.d_AB > 0):
            raise ValueError("sigma2, c, n and d_AB must be positive")
        if self.rate_mode not in RATE_MODES:
            raise ValueError(f"rate_mode must be one of {RATE_MODES}")
        if not 0.0 <= self.numfail_budget <= 1.0:
            raise ValueError("numfail_budget is a fraction in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if self.sweep_param is not None:
            if self.sweep_param not in SWEEP_PARAMS:
                raise ValueError(f"cannot sweep {self.sweep_param!r}; choose from {SWEEP_PARAMS}")
            for v in self.sweep_values:
                self.at(v)

    @property
    def R0(self):
        return 0.5 * math.log2(1 + db_to_linear(self.P_dB) * self.d_AB ** 2 / self.sigma2)

    @property
    def requirements(self):
        R = self.K * self.R0
        return RateRequirements(self.alpha * R, (1 - self.alpha) * R)

    @property
    def params(self):
        P = float(db_to_linear(self.P_dB))
        s2 = self.sigma2
        return SystemParams(M=int(self.M), P_A=P, P_B=P, P_C=float(db_to_linear(self.P_C_dB)),
                            sigma2_A=s2, sigma2_B=s2, sigma2_C=s2, sigma2_D=s2,
                            c=self.c, n=self.n)

    def points(self):
        """Sweep values in run order; a single ``None`` point when not sweeping."""
        return list(self.sweep_values) if self.sweep_param else [None]

    def at(self, value):
        """The configuration at one sweep point."""
        if value is None or self.sweep_param is None:
            return self
        v = int(value) if self.sweep_param == "M" else float(value)
        return replace(self, **{self.sweep_param: v, "sweep_param": None, "sweep_values": ()})


@dataclass
class StrategyOutcome:
    status: str                      # "ok" | "outage" | "numfail"
    su_rate: float = 0.0
    su_sinr: float = 0.0
    power_share: float = 0.0
    relay_share: float = 0.0
    path: str = None
    iterations: int = 0
    reduction_iterations: int = 0

    @property
    def feasible(self):
        return self.status == "ok"


@dataclass
class TrialRecord:
    trial: int
    sweep_value: object
    a_A: int
    a_B: int
    mac_ok: bool
    outcomes: dict = field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def _design(strategy, real, reqs, ind):
    if strategy == "AF":
        return design_af(real, reqs, ind)
    if strategy == "DF-XOR":
        return design_dfxor(real, reqs, ic=(ind.a_A == 0 and ind.a_B == 0), indicators=ind)
    return design_dfsup(real, reqs, canceled=ind.decoded, indicators=ind)


def run_trial(config, point=None, trial=0):
    """Draw one realization and run every configured strategy on it.

    ``point`` is a sweep value of ``config.sweep_param`` (or ``None``).
    """
    cfg = config.at(point)
    geo = make_geometry(cfg.d_AC, cfg.d_AB)
    real = draw_realization(geo, cfg.params, trial_rng(cfg.seed, trial))
    return run_realization(cfg, real, trial=trial, point=point)


def run_realization(config, real, trial=0, point=None):
    """Run every strategy of ``config`` on a given realization.

    The rate targets come from ``config``; everything physical (powers,
    noise, channels) comes from ``real``.
    """
    reqs = config.requirements
    ind = sic_decode_indicators(real, reqs)
    mac_ok = mac_region_check(real, reqs, sum_power_b=config.sum_power_b)
    rec = TrialRecord(trial=int(trial), sweep_value=point, a_A=ind.a_A, a_B=ind.a_B,
                      mac_ok=mac_ok)
    P_C = real.params.P_C
    for s in config.strategies:
        if s != "AF" and not mac_ok:
            rec.outcomes[s] = StrategyOutcome("outage", path="MAC")
            continue
        try:
            d = _design(s, real, reqs, ind)
        except NumericalFailure:
            rec.outcomes[s] = StrategyOutcome("numfail")
            continue
        if not d.feasible:
            rec.outcomes[s] = StrategyOutcome("outage", path=d.path)
            continue
        rep = evaluate_rates(d, real, ind)
        rec.outcomes[s] = StrategyOutcome(
            "ok", su_rate=rep.su_rate, su_sinr=rep.su_sinr,
            power_share=d.su_power / P_C if P_C > 0 else 0.0,
            relay_share=d.relay_power / P_C if P_C > 0 else 0.0,
            path=d.path, iterations=d.iterations,
            reduction_iterations=d.reduction_iterations)
    return rec


@dataclass
class AggregateStats:
    strategy: str
    n_trials: int
    n_numfail: int
    n_outage: int
    outage_prob: float
    mean_su_rate_conditional: float
    mean_su_rate_zerofill: float
    stderr_rate_conditional: float
    stderr_rate_zerofill: float
    mean_power_share: float
    stderr_power_share: float
    mode: str = "conditional"

    @property
    def mean_su_rate(self):
        return (self.mean_su_rate_conditional if self.mode == "conditional"
                else self.mean_su_rate_zerofill)

    @property
    def stderr_rate(self):
        return (self.stderr_rate_conditional if self.mode == "conditional"
                else self.stderr_rate_zerofill)

    @property
    def stderr_outage(self):
        n = self.n_trials - self.n_numfail
        p = self.outage_prob
        return math.sqrt(p * (1 - p) / n) if n > 0 else float("nan")


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return float("nan"), float("nan")
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


def aggregate(records, mode="conditional", strategies=None):
    """Per-strategy statistics over ``records`` (one :class:`AggregateStats` each).

    Trials with a numerical failure are dropped from every statistic,
    including the outage denominator.
    """
    if mode not in RATE_MODES:
        raise ValueError(f"mode must be one of {RATE_MODES}")
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    if strategies is None:
        strategies = list(records[0].outcomes)
    out = {}
    for s in strategies:
        outs = [r.outcomes[s] for r in records]
        valid = [o for o in outs if o.status != "numfail"]
        if not valid:
            raise NumericalFailure(f"every trial of {s} failed numerically")
        ok = [o for o in valid if o.feasible]
        n_out = len(valid) - len(ok)
        mc, sc = _mean_se([o.su_rate for o in ok])
        mz, sz = _mean_se([o.su_rate if o.feasible else 0.0 for o in valid])
        mp, sp = _mean_se([o.power_share for o in ok])
        out[s] = AggregateStats(
            strategy=s, n_trials=len(outs), n_numfail=len(outs) - len(valid), n_outage=n_out,
            outage_prob=n_out / len(valid), mean_su_rate_conditional=mc,
            mean_su_rate_zerofill=mz, stderr_rate_conditional=sc, stderr_rate_zerofill=sz,
            mean_power_share=mp, stderr_power_share=sp, mode=mode)
    return out


def _paired(pairs, metric, mode):
    pairs = [(a, b) for a, b in pairs if a.status != "numfail" and b.status != "numfail"]
    n = len(pairs)
    if n == 0:
        raise ValueError("no trials usable for a paired comparison")
    infl, means = [], []
    for k in (0, 1):
        ok = np.array([row[k].feasible for row in pairs], dtype=float)
        x = np.array([getattr(row[k], metric) if row[k].feasible else 0.0 for row in pairs])
        if mode == "zero-fill":
            m = x.mean()
            infl.append(x - m)
        else:
            pf = ok.mean()
            if pf == 0:
                return float("nan"), float("nan")
            m = x.sum() / ok.sum()
            infl.append(ok * (x - m) / pf)
        means.append(m)
    d = infl[0] - infl[1]
    se = float(d.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return float(means[0] - means[1]), se


def paired_difference(records, s1, s2, metric="su_rate", mode="conditional"):
    """Mean of ``metric`` for ``s1`` minus that of ``s2``, with a paired standard error.

    Both strategies ran on the same realizations, so the error of the
    difference is estimated trial by trial. For the conditional mean (a
    ratio of two trial averages) each trial contributes its linearised
    influence ``1[feasible] (x - mean) / P(feasible)``. Trials where either
    strategy failed numerically are dropped.

    Returns ``(difference, stderr)``.
    """
    return _paired([(r.outcomes[s1], r.outcomes[s2]) for r in records], metric, mode)


def point_difference(records_a, records_b, strategy, metric="su_rate", mode="conditional"):
    """Like :func:`paired_difference` but between two sweep points of one strategy.

    Sweep points reuse the trial draws, so records are paired by trial index.
    """
    b = {r.trial: r for r in records_b}
    pairs = [(r.outcomes[strategy], b[r.trial].outcomes[strategy]) for r in records_a
             if r.trial in b]
    return _paired(pairs, metric, mode)


@dataclass
class SweepResult:
    config: SimConfig
    points: list
    records: list          # one list of TrialRecord per point, in trial order
    stats: list            # one {strategy: AggregateStats} per point

    def numfail_exceeded(self):
        budget = self.config.numfail_budget
        return any(st.n_numfail > budget * st.n_trials
                   for row in self.stats for st in row.values())


def _work(args):
    config, point, trial = args
    return run_trial(config, point, trial)


def run_sweep(config, threads=None):
    """Run every trial at every sweep point and aggregate per point.

    ``threads`` (default ``config.threads``) worker processes share the
    trials; results are folded in (point, trial) order so the output does
    not depend on the worker count.
    """
    threads = config.threads if threads is None else int(threads)
    points = config.points()
    jobs = [(config, p, t) for p in points for t in range(config.trials)]
    if threads <= 1:
        results = [_work(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            chunk = max(1, len(jobs) // (4 * threads))
            results = list(ex.map(_work, jobs, chunksize=chunk))
    records, stats = [], []
    for k, p in enumerate(points):
        recs = results[k * config.trials:(k + 1) * config.trials]
        records.append(recs)
        stats.append(aggregate(recs, config.rate_mode, config.strategies))
    return SweepResult(config=config, points=points, records=records, stats=stats)
