"""Write SVG pictures of a squeezed stack and of xi_n into an output directory."""

import argparse
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ctrlk.geo import CYCLIC, GeoModule, Window, pt
from ctrlk.render import render_svg
from ctrlk.reps import xi_rep
from ctrlk.squeeze import IntervalSpec, squeeze_total


@dataclass
class Config:
    out_dir: Path = Path("figures")
    layers: int = 6
    n: int = 5


def main(cfg: Config):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    A = GeoModule(CYCLIC, {pt(Fraction(1, 5)): 1, pt(Fraction(3, 4)): 2})
    stack = squeeze_total(A, IntervalSpec(0), N=cfg.layers)
    w = Window(-1, 2, 0, cfg.layers + 1)
    (cfg.out_dir / "stack.svg").write_text(render_svg(stack, w))
    f = xi_rep(cfg.n).forward
    (cfg.out_dir / f"xi{cfg.n}.svg").write_text(render_svg(f, Window(-1, 2, 0, 2)))
    print(f"wrote {cfg.out_dir}/stack.svg and {cfg.out_dir}/xi{cfg.n}.svg")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", type=Path, default=Path("figures"))
    p.add_argument("--layers", type=int, default=6)
    p.add_argument("--n", type=int, default=5)
    a = p.parse_args()
    main(Config(a.out_dir, a.layers, a.n))
