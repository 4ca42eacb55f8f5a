"""Draw the canonical foliations of a round annulus as SVG.

    python3 scripts/annulus_figure.py --outer 0,0,3 --inner 0.8,0.3,1 -o annulus.svg
"""

import argparse

from looptop.annuli import Annulus, canonical_foliations, foliation_svg, orthogonality_residuals, parse_circle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outer", default="0,0,3")
    ap.add_argument("--inner", default="0.8,0.3,1")
    ap.add_argument("--radial", type=int, default=24)
    ap.add_argument("--circular", type=int, default=10)
    ap.add_argument("-o", "--output", default="annulus.svg")
    args = ap.parse_args()

    A = Annulus(parse_circle(args.outer), parse_circle(args.inner))
    F = canonical_foliations(A, args.radial, args.circular, samples=200)
    res = orthogonality_residuals(F)
    with open(args.output, "w") as fh:
        fh.write(foliation_svg(F, 640, 640))
    print(f"R = {F.R:.10f}, max orthogonality residual {res.max():.2e}, wrote {args.output}")


if __name__ == "__main__":
    main()
