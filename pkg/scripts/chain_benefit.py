#!/usr/bin/env python3
"""Measure how much one non-simultaneous chain adds to online matching.

Compares O_k against O^c_k on paired graph realizations over a doubling
n-ladder, for the all-hard pool (rho=1, k=3) and the mixed pool (k=2).
"""

from __future__ import annotations

import argparse

from matchpool.harness import PolicyConfig, ScenarioConfig, scaling_study


def run_case(name, rho, k, n_values, trials, seed, workers):
    cfg = ScenarioConfig(
        name=name, rho=rho, c=2.0, p=0.3,
        policies=(
            PolicyConfig(f"O{k}", "CHAIN", k=k),
            PolicyConfig(f"O{k}c", "CHAIN", k=k, with_chain=True),
        ),
        n_values=n_values, trials=trials, master_seed=seed,
        comparisons=((f"O{k}c", f"O{k}"),),
    )
    res = scaling_study(cfg, workers=workers)
    print(f"{name} (rho={rho}, k={k}): {res.verdicts[(f'O{k}c', f'O{k}')]}")
    for g in res.gaps[(f"O{k}c", f"O{k}")]:
        print(f"  n={g.n:>6} gap/n={g.mean_gap_per_n:+.5f} "
              f"CI=({g.ci95[0]:+.5f},{g.ci95[1]:+.5f})")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=424242)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--ladder", type=int, nargs="+", default=[500, 1000, 2000])
    args = ap.parse_args()
    run_case("all-hard", 1.0, 3, tuple(args.ladder), args.trials, args.seed,
             args.workers)
    run_case("mixed", 0.5, 2, tuple(args.ladder), args.trials, args.seed,
             args.workers)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
