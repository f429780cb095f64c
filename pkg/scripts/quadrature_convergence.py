"""Error of the node-based evaluators against the series on doubling node schedules.

Prints two blocks: Gauss-Legendre nodes per segment for the inverse-Gamma
integral, and trapezoid nodes per dimension for the Shmueli integral.
"""

import argparse

from compoisson import ComPoissonParams, QuadConfig, Rule, z_cahen_quad, z_series, z_shmueli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=2.0)
    ap.add_argument("--nu", type=int, default=3)
    args = ap.parse_args(argv)

    p = ComPoissonParams(args.lam, args.nu)
    ref = z_series(p)
    print(f"Z({args.lam}, {args.nu}) = {ref.decimal_string()}")
    print("gauss nodes/segment   rel error")
    for n in (4, 8, 16, 32):
        print(f"{n:>19d}   {z_cahen_quad(p, QuadConfig.cahen(n)).rel_diff(ref):.3e}")
    if args.nu in (2, 3):
        print("trapezoid nodes/dim   rel error")
        for n in (4, 8, 16, 32, 64):
            quad = QuadConfig(nodes_per_dim=n, dims=args.nu - 1, rule=Rule.TRAPEZOID_PERIODIC)
            print(f"{n:>19d}   {z_shmueli(args.lam, args.nu, quad).rel_diff(ref):.3e}")


if __name__ == "__main__":
    main()
