"""Driving the command line from a config file.

Writes an INI config, runs a figure analog through the ``cogrelay`` entry
point and prints the CSV it produced, then runs the oracle self-test.
"""

import tempfile
from pathlib import Path

from cogrelay.cli import main as cogrelay

CONFIG = """\
[system]
M = 3
alpha = 0.1
K = 1

[sweep]
values = 0, 10, 20

[run]
trials = 10
seed = 4
"""


def main():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "asym.ini"
        out = Path(tmp) / "rate_vs_pc.csv"
        cfg.write_text(CONFIG)
        code = cogrelay(["figure", "rate_vs_pc", "--config", str(cfg), "--set", "P_dB=5",
                         "--out", str(out)])
        print(f"figure exit code {code}")
        print(out.read_text())
    print(f"selftest exit code {cogrelay(['selftest'])}")


if __name__ == "__main__":
    main()
