#!/usr/bin/env python
"""Sample the Hardy state repeatedly and confirm the u,u outcome never appears."""
from __future__ import annotations

import argparse

from negwave.scenarios import build_hardy, sample


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 20240601])
    args = p.parse_args()

    psi = build_hardy().psi
    for seed in args.seeds:
        res = sample(psi, None, args.n, seed)
        freqs = {"".join(k): c / args.n for k, c in res.counts.items()}
        print(f"seed={seed:<10d} " + "  ".join(f"{k}={v:.4f}" for k, v in freqs.items()))


if __name__ == "__main__":
    main()
