"""Bound, concurrence and Horodecki maximum along the lambda family.

Also compares the numeric curve with the correlation-matrix value
sqrt2 max(7 + 2 lambda, 4 lambda) / 9 and reports onset and turning point.

    python3 scripts/lambda_family.py --out results/lambda.csv --plot results/lambda.png
"""

from __future__ import annotations

import argparse
import csv
import math
import os
from dataclasses import dataclass

from chshbound.entanglement import concurrence
from chshbound.optimizer import (
    OptimizerConfig,
    find_onset,
    find_turning_point,
    lambda_grid,
    sweep_lambda,
)
from chshbound.states import lambda_state

SQ2 = math.sqrt(2)


@dataclass(frozen=True)
class FamilyConfig:
    step: float = 0.01
    starts: int = 64
    seed: int = 0
    out: str = "results/lambda_family.csv"
    plot: str | None = None


def reference_bound(lam: float) -> float:
    return SQ2 * max(7 + 2 * lam, 4 * lam) / 9


def run(cfg: FamilyConfig) -> dict:
    opt = OptimizerConfig(num_starts=cfg.starts, seed=cfg.seed)
    rows = sweep_lambda(lambda_grid(cfg.step), opt)
    os.makedirs(os.path.dirname(cfg.out) or ".", exist_ok=True)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "bound", "reference", "concurrence", "horodecki_max"])
        for r in rows:
            w.writerow([r.lam, r.bound, reference_bound(r.lam), r.concurrence, r.horodecki_max])

    onset = find_onset(cfg=opt, step=cfg.step, rows=rows)
    summary = {
        "max_reference_gap": max(abs(r.bound - reference_bound(r.lam)) for r in rows),
        "onset": onset,
        "onset_exact": (9 * SQ2 - 7) / 2,
        "onset_concurrence": concurrence(lambda_state(onset)),
        "turning_point": find_turning_point(cfg=opt, step=cfg.step, rows=rows),
        "max_bound": max(r.bound for r in rows),
    }
    if cfg.plot:
        _plot(rows, cfg.plot)
    return summary


def _plot(rows, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lams = [r.lam for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lams, [r.bound for r in rows], label="vertical bound")
    ax.plot(lams, [r.horodecki_max for r in rows], label="Horodecki maximum")
    ax.axhline(2.0, color="grey", ls="--", lw=0.8)
    ax2 = ax.twinx()
    ax2.plot(lams, [r.concurrence for r in rows], "g:", label="concurrence")
    ax2.set_ylabel("concurrence")
    ax.set_xlabel("lambda")
    ax.set_ylabel("max |<W>|")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def main() -> None:
    d = FamilyConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--step", type=float, default=d.step)
    p.add_argument("--starts", type=int, default=d.starts)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--out", default=d.out)
    p.add_argument("--plot", default=None, help="PNG path; needs matplotlib")
    a = p.parse_args()
    summary = run(FamilyConfig(step=a.step, starts=a.starts, seed=a.seed, out=a.out, plot=a.plot))
    for k, v in summary.items():
        print(f"{k}: {v}")


if __name__ == "__main__":
    main()
