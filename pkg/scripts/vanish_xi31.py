"""Run the full vanishing construction on the shifted 1/n-step automorphism.

    python3 scripts/vanish_xi31.py --n 31 --group cyclic --t-max 10
"""

import argparse
import json
import time
from dataclasses import dataclass
from fractions import Fraction

from ctrlk.reps import r_rep, xi_rep
from ctrlk.squeeze import IntervalSpec
from ctrlk.vanish import default_window, run_vanishing


@dataclass
class Config:
    n: int = 31
    group: str = "cyclic"
    interval: Fraction = Fraction(0)
    t_max: int = 10
    report: str | None = None


def main(cfg: Config) -> int:
    b = xi_rep(cfg.n) if cfg.group == "cyclic" else r_rep(cfg.n)
    I = IntervalSpec(cfg.interval)
    start = time.perf_counter()
    rep = run_vanishing(b.forward, b.inverse, I, None, default_window(I, cfg.t_max))
    for line in rep.summary_lines():
        print(line)
    print(f"elapsed {time.perf_counter() - start:.2f}s")
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            json.dump(rep.to_json(), fh, indent=2, sort_keys=True)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=31)
    p.add_argument("--group", choices=("cyclic", "dihedral"), default="cyclic")
    p.add_argument("--interval", type=Fraction, default=Fraction(0))
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--report")
    a = p.parse_args()
    raise SystemExit(main(Config(a.n, a.group, a.interval, a.t_max, a.report)))
