"""Finite-size scan: observed peak of P(s <= Q <= s+delta) against the Eq14 bound.

The bound is asymptotic in s; small chains overshoot it at some sizes.

    python scripts/scan_eq14.py [ratio] [s_max]
"""

import sys

import numpy as np

from feynclock.experiments import run_telomere, time_grid
from feynclock.observables import bound_eq14, completion_probability


def scan(ratio=0.5, s_max=320):
    s = 10
    print(f"{'s':>5} {'delta':>5} {'peak P(s<=Q)':>13} {'peak P(s<Q)':>12} {'bound':>9} {'excess':>10}")
    while s <= s_max:
        d = max(1, int(round(ratio * s)))
        spec, res = run_telomere(s, d, time_grid(2.0 * (s + 2 * d), 0.05))
        peak = completion_probability(res, spec).max()
        beyond = res.probability(spec.basis.mask(sites=(s + 1, s + d))).max()
        b = bound_eq14(s, d)
        print(f"{s:5d} {d:5d} {peak:13.6f} {beyond:12.6f} {b:9.6f} {peak - b:+10.6f}")
        s *= 2


if __name__ == "__main__":
    args = [float(sys.argv[1])] if len(sys.argv) > 1 else []
    if len(sys.argv) > 2:
        args.append(int(sys.argv[2]))
    scan(*args)
