"""Write the admissible-region boundary and the sharpness trade-off curve as CSV.

    python3 scripts/reproduce_fig1.py --out results/
"""
import argparse
import math
from pathlib import Path

from qubitjm.analysis import boundary_scan, critical_nc, critical_sharpness_pair, tradeoff_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--angles", type=int, default=361)
    ap.add_argument("--points", type=int, default=101)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    x, m, y = -0.1, 0.8, 0.3
    scans = {c: boundary_scan(x, (m, 0, 0), y, args.angles, criterion=c) for c in ("thm1", "thm2", "srh", "bs")}
    with open(args.out / "boundary.csv", "w", newline="\n") as fh:
        fh.write("theta,thm1,thm2,srh,bs\n")
        for i, theta in enumerate(scans["thm1"].thetas):
            fh.write(",".join(format(v, ".17g") for v in [theta] + [scans[c].n_max[i] for c in scans]) + "\n")
    ref = scans["thm1"]
    print(f"boundary: n_max in [{ref.n_max.min():.9f}, {ref.n_max.max():.9f}], n_c = {critical_nc(x, m, y):.9f}")
    print(f"cones: forward {math.degrees(ref.forward_cone):.3f} deg, backward {math.degrees(ref.backward_cone):.3f} deg")

    x, y, c = -0.1, 0.2, 0.3
    curve = tradeoff_curve(x, y, c, args.points)
    with open(args.out / "tradeoff.csv", "w", newline="\n") as fh:
        fh.write("m,n_max\n")
        for mm, n in curve.samples:
            fh.write(f"{mm:.17g},{n:.17g}\n")
    m0, n0 = critical_sharpness_pair(x, y, c)
    print(f"trade-off: m0 = {m0:.9f}, n0 = {n0:.9f}")


if __name__ == "__main__":
    main()
