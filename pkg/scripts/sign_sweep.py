"""Run every recursion sign convention against the closed form and Sullivan's relation.

    python3 scripts/sign_sweep.py [--k 10] [--field Q] [--json out.json]
"""

import argparse
import json

from looptop.rings import ring_from_name
from looptop.sphere import PINNED_CONVENTION, structure_diagnostics, sweep_conventions


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--field", default="Q")
    ap.add_argument("--json")
    args = ap.parse_args()
    ring = ring_from_name(args.field)

    sweep = sweep_conventions(args.k, ring)
    diag = structure_diagnostics(args.k, ring)
    print(f"field {ring.name}, k <= {args.k}, pinned: {PINNED_CONVENTION}")
    for cid, row in sweep.items():
        rec = "match" if row["recursion_matches_closed"] else f"{len(row['mismatched_inputs'])} mismatches"
        print(f"  {cid:<10} recursion {rec:<15} sullivan {row['sullivan_violations']}/{row['sullivan_checked']}")
    for name, row in diag.items():
        print(f"  {name:<28} {row['violations']}/{row['checked']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"sweep": sweep, "diagnostics": diag}, fh, indent=2)


if __name__ == "__main__":
    main()
