"""Command-line front end: ``solve``, ``sweep``, ``figure`` and ``selftest``.

Configuration files are INI-style with ``[system]``, ``[sweep]`` and
``[run]`` sections; keys before the first header are resolved by name.
Every key can also be given as ``--set key=value`` or
``--set section.key=value``.
"""

import argparse
import configparser
import csv
import io
import json
import sys
from dataclasses import fields, replace

from . import simkit
from .simkit import SWEEP_PARAMS, SimConfig, run_sweep, run_trial

EXIT_OK, EXIT_USAGE, EXIT_NUMFAIL = 0, 1, 2

SECTIONS = {
    "system": ("M", "d_AC", "d_AB", "P_dB", "P_C_dB", "sigma2", "c", "n", "alpha", "K",
               "sum_power_b"),
    "sweep": ("param", "values"),
    "run": ("trials", "seed", "threads", "strategies", "rate_mode", "numfail_budget"),
}
_FIELD = {("sweep", "param"): "sweep_param", ("sweep", "values"): "sweep_values"}
_TOP = "__top__"

FIGURES = {
    # name: (swept parameter, default grid)
    "rate_vs_pc": ("P_C_dB", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
    "outage_vs_pc": ("P_C_dB", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
    "share_vs_pc": ("P_C_dB", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
    "rate_vs_dac": ("d_AC", (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)),
    "rate_vs_m": ("M", (2, 3, 4, 5, 6)),
    "outage_vs_m": ("M", (2, 3, 4, 5, 6)),
}

CSV_COLUMNS = ("sweep_value", "strategy", "mean_su_rate_conditional", "mean_su_rate_zerofill",
               "outage_prob", "mean_power_share", "stderr_rate", "n_trials", "n_numfail")


class ConfigError(ValueError):
    """Malformed, unknown or out-of-range configuration entry."""


def _key_section(key):
    hits = [s for s, keys in SECTIONS.items() if key in keys]
    if len(hits) != 1:
        raise ConfigError(f"unknown configuration key {key!r}")
    return hits[0]


def _convert(section, key, raw):
    raw = raw.strip()
    try:
        if key in ("M", "trials", "seed", "threads"):
            return int(raw)
        if key == "sum_power_b":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if key == "param":
            return None if raw.lower() in ("", "none") else raw
        if key == "values":
            return tuple(float(v) for v in raw.replace(",", " ").split())
        if key == "strategies":
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key == "rate_mode":
            return raw
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from None


def _apply(values, section, key, raw):
    if section == _TOP:
        section = _key_section(key)
    elif section not in SECTIONS:
        raise ConfigError(f"unknown section [{section}]")
    elif key not in SECTIONS[section]:
        raise ConfigError(f"unknown key {key!r} in [{section}]")
    values[_FIELD.get((section, key), key)] = _convert(section, key, raw)


def _build(values):
    if values.get("sweep_param") == "M" and "sweep_values" in values:
        values["sweep_values"] = tuple(int(v) for v in values["sweep_values"])
    try:
        return SimConfig(**values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _read_sections(text):
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_TOP}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    for section in cp.sections():
        for key, raw in cp.items(section):
            yield section, key, raw


def parse_config(text, overrides=()):
    """Build a :class:`SimConfig` from configuration text plus ``key=value`` overrides."""
    values = {}
    for section, key, raw in _read_sections(text):
        _apply(values, section, key, raw)
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        section, dot, name = key.strip().rpartition(".")
        _apply(values, section if dot else _TOP, name, raw)
    return _build(values)


def emit_config(config):
    """Text that :func:`parse_config` maps back to ``config``."""
    inv = {v: k for k, v in _FIELD.items()}
    by_section = {s: [] for s in SECTIONS}
    for f in fields(SimConfig):
        section, key = inv.get(f.name, (None, f.name))
        if section is None:
            section = _key_section(key)
        v = getattr(config, f.name)
        if isinstance(v, tuple):
            text = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
        elif v is None:
            text = "none"
        else:
            text = repr(v) if isinstance(v, float) else str(v)
        by_section[section].append(f"{key} = {text}")
    out = io.StringIO()
    for s, lines in by_section.items():
        out.write(f"[{s}]\n" + "\n".join(lines) + "\n\n")
    return out.getvalue()


def _fmt(x):
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if x != x:
        return "nan"
    return f"{x:.12g}"


def sweep_csv(result):
    """CSV text of a :class:`~cogrelay.simkit.SweepResult`, rows sorted by (value, strategy)."""
    rows = []
    for value, stats in zip(result.points, result.stats):
        for name, st in stats.items():
            rows.append((value, name, st))
    rows.sort(key=lambda r: (float(r[0]) if r[0] is not None else 0.0, r[1]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for value, name, st in rows:
        w.writerow(["" if value is None else _fmt(value), name, _fmt(st.mean_su_rate_conditional),
                    _fmt(st.mean_su_rate_zerofill), _fmt(st.outage_prob),
                    _fmt(st.mean_power_share), _fmt(st.stderr_rate), str(st.n_trials),
                    str(st.n_numfail)])
    return buf.getvalue()


def figure_config(name, config):
    """``config`` swept as figure ``name`` needs; an explicit sweep grid is kept."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    param, grid = FIGURES[name]
    values = config.sweep_values if config.sweep_param == param and config.sweep_values else grid
    if param == "M":
        values = tuple(int(v) for v in values)
    try:
        return replace(config, sweep_param=param, sweep_values=values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_figure(name, config, out=None, threads=None):
    """Run figure ``name`` and write its CSV to ``out`` (path or file object).

    Returns the :class:`~cogrelay.simkit.SweepResult`.
    """
    cfg = figure_config(name, config)
    result = run_sweep(cfg, threads=threads)
    _write(out, sweep_csv(result))
    return result


def cmd_sweep(config, out=None, threads=None):
    result = run_sweep(config, threads=threads)
    _write(out, sweep_csv(result))
    return result


def cmd_solve(config, trial=0, out=None):
    """Design every strategy on one realization and write a JSON summary."""
    point = config.sweep_values[0] if config.sweep_param and config.sweep_values else None
    rec = run_trial(config, point, trial)
    _write(out, json.dumps(rec.as_dict(), indent=2, sort_keys=True) + "\n")
    return rec


def cmd_selftest(out=None):
    """Run the oracle suite; returns ``True`` when every check passes."""
    from .selftest import run_selftest

    checks = run_selftest()
    lines = [c.line() for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"selftest: {sum(c.passed for c in checks)}/{len(checks)} passed")
    _write(out, "\n".join(lines) + "\n")
    return ok


def _write(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    elif hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI-style configuration file")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        dest="overrides", help="override one configuration key (repeatable)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    common.add_argument("--threads", type=int, help="worker processes")

    p = _Parser(prog="cogrelay", description="Cognitive two-way relay precoder design and "
                "Monte Carlo evaluation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", parents=[common], help="design all strategies on one draw")
    s.add_argument("--trial", type=int, default=0, help="trial index of the draw")
    sub.add_parser("sweep", parents=[common], help="run the configured [sweep]")
    f = sub.add_parser("figure", parents=[common], help="run a figure-analog sweep")
    f.add_argument("name", choices=sorted(FIGURES))
    sub.add_parser("selftest", parents=[common], help="run the oracle self-checks")
    return p


def _load(args):
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    over = list(args.overrides)
    for key in ("seed", "trials", "threads"):
        v = getattr(args, key)
        if v is not None:
            over.append(f"run.{key}={v}")
    return parse_config(text, over)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return EXIT_OK if cmd_selftest(args.out) else EXIT_NUMFAIL
        cfg = _load(args)
        if args.command == "solve":
            cmd_solve(cfg, args.trial, args.out)
            return EXIT_OK
        if args.command == "sweep":
            result = cmd_sweep(cfg, args.out)
        else:
            result = cmd_figure(args.name, cfg, args.out)
    except (ConfigError, OSError) as exc:
        print(f"cogrelay: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except simkit.NumericalFailure as exc:
        print(f"cogrelay: {exc}", file=sys.stderr)
        return EXIT_NUMFAIL
    if result.numfail_exceeded():
        print("cogrelay: numerical-failure budget exceeded", file=sys.stderr)
        return EXIT_NUMFAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
