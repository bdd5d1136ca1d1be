#!/usr/bin/env python3
"""End-to-end audit demo: the discriminant against two quadratic families.

Over F_p the discriminant vanishes on every perfect square (cx + dy)^2 yet
is nonzero at xy, so it separates the squares family from that hard
candidate.  Against the full coefficient space the same test polynomial is
immediately refuted by a hitting witness.
"""

import argparse
import json

from npl import (
    FamilyDescriptor,
    PolySpace,
    PrimeField,
    SparsePoly,
    discriminant,
    natural_proof_audit,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", type=int, default=7)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    field = PrimeField(args.field)
    space = PolySpace(2, 2, True)
    disc = discriminant(field)
    hard = SparsePoly(field, 2, {(1, 1): 1})

    reports = {}
    for name in ("squares", "full-space"):
        desc = FamilyDescriptor(name, space, field)
        reports[name] = natural_proof_audit(disc, desc, hard, exhaustive=True)

    if args.json:
        print(json.dumps(
            {k: r.to_json() for k, r in reports.items()}, indent=2
        ))
        return

    for name, r in reports.items():
        line = f"{name:<11} -> {r.classification}"
        if r.classification == "refuted":
            w = r.evidence.witness_params
            line += f" (witness params {w}, value {r.evidence.witness_value})"
        else:
            line += (f" (zeros {r.evidence.zeros}/{r.evidence.examined}, "
                     f"hard value {r.hard_value})")
        print(line)


if __name__ == "__main__":
    main()
