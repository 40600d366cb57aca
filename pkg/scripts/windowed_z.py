"""Experiment: build Gamma over a window [-W, W] of the integers and report K0.

Nothing is asserted; the output is a table of window size, graph size and K0.

    python3 scripts/windowed_z.py --windows 2 4 8
"""

import argparse
import time
from dataclasses import dataclass

from graphk0.abelian import FgAbelianGroup, parse_group_spec
from graphk0.gamma import build
from graphk0.ktheory import k0


@dataclass
class ExperimentConfig:
    spec: str = "Z"
    windows: tuple = (2, 4, 8)


def run(cfg: ExperimentConfig) -> list[tuple[int, int, str, float]]:
    group = parse_group_spec(cfg.spec)
    rows = []
    for w in cfg.windows:
        t0 = time.perf_counter()
        g = build(group, w)
        result: FgAbelianGroup = k0(g).group
        rows.append((w, len(g.vertices), str(result), time.perf_counter() - t0))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", default="Z", help="group with a free part, e.g. Z or 'Z x Z/2'")
    ap.add_argument("--windows", type=int, nargs="+", default=[2, 4, 8])
    args = ap.parse_args()
    cfg = ExperimentConfig(args.spec, tuple(args.windows))
    print(f"{'W':>3} {'vertices':>9}  {'K0':<16} seconds")
    for w, n, grp, secs in run(cfg):
        print(f"{w:>3} {n:>9}  {grp:<16} {secs:.2f}")


if __name__ == "__main__":
    main()
