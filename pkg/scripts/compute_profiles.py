#!/usr/bin/env python3
"""Compute the compactly supported self-similar profile by both shooting
parameterizations and report their agreement.

Example:
    python3 scripts/compute_profiles.py --m 2 --p 1.5 --sigma 1 --N 1 --out out/profiles
"""

import argparse
import sys
from pathlib import Path

from blowuplab import (
    Problem,
    find_compact_profile_by_slope,
    find_compact_subsolution_profile,
    profile_residual,
)
from blowuplab.cli_io import write_profile


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=2.0)
    ap.add_argument("--p", type=float, default=1.5)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--out", default="out/profiles")
    args = ap.parse_args()

    prob = Problem(m=args.m, p=args.p, sigma=args.sigma, dim=args.N)
    out = Path(args.out)

    prof_a = find_compact_subsolution_profile(prob)
    res_a = profile_residual(prof_a)
    write_profile(prof_a, out, stem="profile_interface_shooting")
    print(f"interface shooting: xi1={prof_a.xi1:.8g} xi2={prof_a.xi2:.8g} "
          f"max f={prof_a.max_f():.6g} residual={res_a:.3g}")

    prof_b = find_compact_profile_by_slope(prob, prof_a.xi1)
    res_b = profile_residual(prof_b)
    write_profile(prof_b, out, stem="profile_slope_shooting")
    agree = abs(prof_b.xi2 - prof_a.xi2) / prof_a.xi2
    print(f"slope shooting:     xi1={prof_b.xi1:.8g} xi2={prof_b.xi2:.8g} "
          f"residual={res_b:.3g}")
    print(f"outer interface relative agreement: {agree:.3g}")
    return 0 if agree < 1e-4 else 1


if __name__ == "__main__":
    sys.exit(main())
