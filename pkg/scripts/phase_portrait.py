"""Phase portraits of the branch flow over a circling pair (branch bearing pi/2).

For each requested pair bearing alpha_1 the script integrates a fan of
starts in the (theta, rho_tilde) plane, draws the orbits as an SVG, and
tabulates period estimates against the conserved quantity level of each
orbit.  Positive alpha_1 gives a center surrounded by closed orbits;
negative alpha_1 has no equilibrium and every orbit runs around the
cylinder.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from cbpursuit import (
    IntegratorConfig,
    NotPeriodicError,
    SpecialCaseSystem,
    conserved_quantity,
    find_periodic_orbit,
    integrate,
)
from cbpursuit.io import write_svg_curves


def orbit_curve(alpha_1, theta0, rho0, horizon, dt=1e-3):
    system = SpecialCaseSystem(alpha_1)
    cfg = IntegratorConfig(t_final=horizon, dt=dt, record_stride=10)
    traj = integrate(system.derivative, np.array([theta0, rho0]), cfg,
                     stepper=system.stepper, min_separation=system.min_separation)
    return traj.samples


def portrait(alpha_1, out_dir):
    s = math.sin(alpha_1)
    horizon = 3.5 * 2 * math.pi / (math.sqrt(2.0) * abs(s))
    if s > 0:
        center = 1.0 / s
        starts = [(math.pi / 2, r * center) for r in (0.25, 0.5, 0.75, 1.0, 1.5, 2.2, 3.0)]
    else:
        starts = [(math.pi / 2, r) for r in (0.4, 0.7, 1.0, 1.5, 2.5)]

    curves, labels, rows = [], [], []
    for theta0, rho0 in starts:
        samples = orbit_curve(alpha_1, theta0, rho0, horizon)
        E = conserved_quantity(theta0, rho0, alpha_1)
        try:
            est, _ = find_periodic_orbit(alpha_1, theta0, rho0, dt=1e-3)
            period, ret = est.period, est.return_distance
        except NotPeriodicError:
            period, ret = math.nan, math.nan
        rows.append((theta0, rho0, E, period, ret))
        # running orbits wind in theta; show one winding to keep the
        # portrait readable
        th = samples[:, 0]
        keep = th <= th[0] + 2 * math.pi
        curves.append(np.stack([th[keep], samples[keep, 1]], axis=1))
        labels.append(f"E = {E:.4f}")

    tag = f"alpha1_{alpha_1:+.4f}".replace("+", "p").replace("-", "m").replace(".", "_")
    out_dir.mkdir(parents=True, exist_ok=True)
    svg = out_dir / f"portrait_{tag}.svg"
    write_svg_curves(svg, curves, labels=labels)
    csv = out_dir / f"periods_{tag}.csv"
    np.savetxt(csv, np.array(rows), delimiter=",",
               header="theta0,rho_tilde0,E,period,return_distance", comments="")

    print(f"alpha_1 = {alpha_1:+.6f}  (linearized center period "
          f"{2 * math.pi / (math.sqrt(2.0) * abs(s)):.4f})")
    for theta0, rho0, E, period, ret in rows:
        print(f"  start ({theta0:.3f}, {rho0:.3f})  E {E:+.4f}  "
              f"period {period:.4f}  return {ret:.2e}")
    print(f"  wrote {svg}")
    print(f"  wrote {csv}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/portraits")
    parser.add_argument("--alpha", type=float, action="append",
                        help="pair bearing in radians (repeatable); "
                             "default: pi/3 and -pi/3")
    args = parser.parse_args()

    values = args.alpha or [math.pi / 3, -math.pi / 3]
    for alpha_1 in values:
        portrait(alpha_1, Path(args.out))
        print()


if __name__ == "__main__":
    main()
