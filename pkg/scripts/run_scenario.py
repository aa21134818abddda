#!/usr/bin/env python3
"""Run one verification scenario and write its artifacts.

Example:
    python3 scripts/run_scenario.py blowup --m 2 --p 1.5 --sigma 1 --N 1 --out out/blowup
"""

import argparse
import sys
from pathlib import Path

from blowuplab import (
    InitialDataSpec,
    Problem,
    run_blowup_scenario,
    run_comparison_scenario,
    run_fsp_scenario,
    run_no_localization_scenario,
    run_threshold_scenario,
)
from blowuplab.cli_io import write_scenario_result


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario", choices=["threshold", "blowup", "fsp",
                                         "no_localization", "comparison"])
    ap.add_argument("--m", type=float, default=2.0)
    ap.add_argument("--p", type=float, default=1.5)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--amplitude", type=float, default=1.0)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--out", default="out/scenario")
    args = ap.parse_args()

    prob = Problem(m=args.m, p=args.p, sigma=args.sigma, dim=args.N)
    bump = InitialDataSpec(kind="compact_bump", amplitude=args.amplitude,
                           radius=args.radius)
    if args.scenario == "threshold":
        res = run_threshold_scenario(prob, [0.5, 1.0, 2.0])
    elif args.scenario == "blowup":
        res = run_blowup_scenario(prob, bump)
    elif args.scenario == "fsp":
        res = run_fsp_scenario(prob, bump)
    elif args.scenario == "no_localization":
        res = run_no_localization_scenario(prob, bump)
    else:
        hi = InitialDataSpec(kind="compact_bump", amplitude=2 * args.amplitude,
                             radius=1.5 * args.radius)
        res = run_comparison_scenario(prob, bump, hi)

    paths = write_scenario_result(res, Path(args.out))
    print(f"{res.name}: {res.verdict} -> {paths['result']}")
    for k, v in sorted(res.criteria.items()):
        print(f"  {k}: {'ok' if v else 'VIOLATED'}")
    return 0 if res.verdict == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
