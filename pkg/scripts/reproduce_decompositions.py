#!/usr/bin/env python
"""Print psi, Indep, Negative and the cancellation table for every scenario."""
from __future__ import annotations

import argparse
import math

from negwave.fockstate import render
from negwave.negative import cancellation_report
from negwave.scenarios import build_scenario


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--theta", type=float, default=math.atan2(0.6, 0.8), help="angle for rotated-pbs")
    p.add_argument("--paper-literal", action="store_true")
    args = p.parse_args()

    for name in ("sps-cascade", "rotated-pbs", "hardy", "single-photon-bs", "detector-atoms"):
        sc = build_scenario(name, theta=args.theta, paper_literal=args.paper_literal)
        d = sc.decomposition
        print(f"=== {name} {dict(sc.params)}")
        print(f"psi      = {render(d.psi)}")
        print(f"indep    = {render(d.indep)}")
        print(f"negative = {render(d.negative)}")
        print(f"beta*psi = alpha*indep - negative with alpha={d.alpha:.6g}, beta={d.beta:.6g}")
        if len(sc.residual):
            print(f"residual = {render(sc.residual)}")
        print(cancellation_report(d).text())
        print()


if __name__ == "__main__":
    main()
