#!/usr/bin/env python3
"""Integrate the stationary Dirichlet profile, map it into the phase plane
and record the heteroclinic orbit with its asymptotic power-law fit.

Example:
    python3 scripts/stationary_portrait.py --m 3 --p 2 --sigma 2 --N 3 --out out/stationary
"""

import argparse
import sys
from pathlib import Path

from blowuplab import (
    Problem,
    check_orbit_asymptotics,
    integrate_stationary_profile,
    phase_critical_points,
    phase_map,
    phase_orbit_from_P0,
    stationary_residual,
    unit_stationary_profile,
)
from blowuplab.cli_io import write_orbit, write_stationary


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=3.0)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--sigma", type=float, default=2.0)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--D", type=float, default=1.0)
    ap.add_argument("--out", default="out/stationary")
    args = ap.parse_args()

    prob = Problem(m=args.m, p=args.p, sigma=args.sigma, dim=args.N)
    out = Path(args.out)

    prof = integrate_stationary_profile(prob, D=args.D)
    write_stationary(prof, out, stem="stationary")
    print(f"stationary: D={prof.D:g} R0={prof.R0:.8g} W(0)={prof.w0():.8g} "
          f"residual={stationary_residual(prof):.3g}")

    unit = unit_stationary_profile(prob)
    write_stationary(unit, out, stem="stationary_unit")
    print(f"unit profile: D1={unit.D:.8g} R0={unit.R0:.8g}")

    for cp in phase_critical_points(prob):
        print(f"critical point (Y={cp.Y:.6g}, Z={cp.Z:.6g}): {cp.kind}, "
              f"eigenvalues {tuple(round(e, 6) for e in cp.eigenvalues)}")

    orbit = phase_orbit_from_P0(prob)
    fit = check_orbit_asymptotics(orbit)
    write_orbit(orbit, out, stem="orbit", fit=fit)
    mapped = phase_map(prof)
    write_orbit(mapped, out, stem="orbit_from_profile")
    print(f"orbit: slope={fit.slope:.6g} (expected {fit.expected_slope:g}), "
          f"theta={fit.theta:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
