"""Print sizes of the small automorphisms against the grid they live on.

Prints one row for each of xi_n, r_n and the class squeezer at each requested
epsilon.  All numbers are exact.
"""

import argparse
from dataclasses import dataclass, field
from fractions import Fraction

from ctrlk.reps import r_rep, squeeze_class, xi_rep
from ctrlk.rings import QQ, RingMatrix, fmt_scalar


@dataclass
class Config:
    n_max: int = 12
    eps: list = field(default_factory=lambda: [Fraction(1, 10), Fraction(1, 50)])
    k: int = 2


def main(cfg: Config):
    print(f"{'n':>4} {'size xi_n':>10} {'size r_n':>10} {'det U(xi_n)':>12}")
    for n in range(1, cfg.n_max + 1):
        xi, r = xi_rep(n), r_rep(n)
        print(f"{n:>4} {fmt_scalar(xi.size):>10} {fmt_scalar(r.size):>10} "
              f"{str(xi.determinant()):>12}")
    M = RingMatrix(QQ, [[2, 1, 0], [1, 1, 0], [0, 0, 3]])
    print()
    print(f"class squeezer, k={cfg.k}, det M = 3")
    for e in cfg.eps:
        b = squeeze_class(cfg.k, M, e)
        print(f"  eps {fmt_scalar(e):>5}: grid N = {b.claim['N']:>4}, "
              f"size = {fmt_scalar(b.forward_sizes.size)}, "
              f"inverse size = {fmt_scalar(b.inverse_sizes.size)}, det U = {b.determinant()}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description="size table for the small representatives")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--eps", type=Fraction, nargs="+", default=[Fraction(1, 10), Fraction(1, 50)])
    a = p.parse_args()
    main(Config(a.n_max, a.eps, a.k))
