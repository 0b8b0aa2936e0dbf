"""Tensor powers of the 1/(2(k+2)) Hankel matrix against the X-norm of their measures.

    python scripts/counterexample.py --N 8 --out counterexample.json
"""

import argparse

from helson.experiments import CounterexampleConfig, counterexample_report
from helson.specio import dumps, write_output


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--sizes", default="256,1024,4096")
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = CounterexampleConfig(N=args.N, sizes=tuple(int(x) for x in args.sizes.split(",")))
    rep = counterexample_report(cfg)
    print(f"X-norm on grid: {rep['xnorm']['sup']:.12f} (at s = {rep['xnorm']['argmax_s']})")
    print(f"lambda_hat = {rep['lambda_hat']:.6f}  (norm pi/2)")
    for row in rep["ratios"]:
        print(f"N={row['N']:2d}  lower estimate {row['estimate']:9.4f}  target {row['target']:9.4f}")
    t = rep["tensor"]
    print(f"tensor check d={t['d']} K={t['K']}: |lam_multi - lam_1d^d| = {t['abs_error']:.2e}")
    print("checks:", rep["checks"])
    if args.out:
        write_output(dumps(rep), args.out)


if __name__ == "__main__":
    main()
