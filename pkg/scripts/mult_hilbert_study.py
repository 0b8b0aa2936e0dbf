"""Spectra of multiplicative Hilbert truncations; writes a JSON report.

    python scripts/mult_hilbert_study.py --sizes 2,64,256,1024,4096 --out mult_hilbert.json
"""

import argparse

from helson.experiments import hankel_norm_study, mult_hilbert_study
from helson.specio import dumps, write_output


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="2,64,256,1024,4096")
    ap.add_argument("--hankel-sizes", default="16,32,64,128,256,512,1024,2048,4096")
    ap.add_argument("--out")
    args = ap.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]
    hsizes = [int(x) for x in args.hankel_sizes.split(",")]
    report = {
        "mult_hilbert": mult_hilbert_study(sizes, strict=False),
        "hilbert": hankel_norm_study("hilbert", hsizes),
        "ramp": hankel_norm_study("ramp", hsizes),
    }
    for row in report["mult_hilbert"]["rows"]:
        print(f"size {row['size']:5d}  lam_min {row['lam_min']: .3e}  lam_max {row['lam_max']:.6f}")
    for key in ("hilbert", "ramp"):
        r = report[key]
        print(f"{key}: lam_max(N={r['sizes'][-1]}) = {r['lam_max'][-1]:.6f}, "
              f"fitted limit {r['extrapolated_limit']:.4f}, norm {r['target_norm']:.6f}")
    if args.out:
        write_output(dumps(report), args.out)


if __name__ == "__main__":
    main()
