#!/usr/bin/env python
"""Correlation E(0, t) of the cascade pair against cos 2t, then the CHSH value."""
from __future__ import annotations

import argparse
import math

import numpy as np

from negwave.scenarios import build_sps_cascade, chsh_value, correlation


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=9)
    args = p.parse_args()

    psi = build_sps_cascade().psi
    print(f"{'t':>10} {'E(0,t)':>14} {'cos 2t':>14}")
    for t in np.linspace(0, math.pi / 2, args.steps):
        print(f"{t:10.6f} {correlation(psi, 0.0, t):14.10f} {math.cos(2 * t):14.10f}")
    s = chsh_value(psi, 0, math.pi / 4, math.pi / 8, 3 * math.pi / 8)
    print(f"\nS(0, pi/4, pi/8, 3pi/8) = {s:.12f}   (2*sqrt2 = {2 * math.sqrt(2):.12f})")


if __name__ == "__main__":
    main()
