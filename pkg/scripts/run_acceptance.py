#!/usr/bin/env python3
"""Run the full acceptance ladder with wall-clock timing per criterion.

Same checks as tests/test_acceptance.py, but as a plain script with a
summary table; handy for timing studies and CI smoke runs.
"""

import argparse
import sys
import time

from ncgkit.checks import (
    check_bianchi_trace,
    check_cech_suite,
    check_chain_character,
    check_character_comparison,
    check_complex_operators,
    check_derivation_suite,
    check_index_suite,
    check_induction_identity,
    check_morita_suite,
    check_pairing_consistency,
    check_partition_counts,
    check_sobolev_suite,
    check_torus_heat_trace,
    check_twisted_complex,
)

LADDER = [
    ("01 induction identity", lambda s: check_induction_identity(seed=s, trials=100, k_max=5)),
    ("02 partition counts", lambda s: check_partition_counts(seed=s, k_top=10)),
    ("03 chain character", lambda s: check_chain_character(seed=s, trials=50)),
    ("04 complex operators", lambda s: check_complex_operators(seed=s, trials=100)),
    ("05 character comparison", lambda s: check_character_comparison(seed=s, resolution=64)),
    ("06a flatness/trace", lambda s: check_bianchi_trace(seed=s, trials=100)),
    ("06b twisted complex", lambda s: check_twisted_complex(seed=s, trials=100)),
    ("07 transition cocycles", lambda s: check_cech_suite(seed=s, rephasings=50)),
    ("08 derivation cochains", lambda s: check_derivation_suite(seed=s, trials=100)),
    ("09 sobolev scales", lambda s: check_sobolev_suite(seed=s, vectors=1000, n_max=200)),
    ("10 module lifts", lambda s: check_morita_suite(seed=s, trials=50)),
    ("11a index integrals", lambda s: check_index_suite(seed=s, refine=2)),
    ("11b heat supertrace", lambda s: check_torus_heat_trace(n_max=32)),
    ("12 pairing consistency", lambda s: check_pairing_consistency(seed=s)),
]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    failures = 0
    total = 0.0
    for name, runner in LADDER:
        t0 = time.time()
        res = runner(args.seed)
        dt = time.time() - t0
        total += dt
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {name:28s} {dt:7.1f}s")
        if not res.passed:
            failures += 1
            for k, v in res.details.items():
                print(f"        {k}: {v}")
    print(f"total {total:.1f}s, failures {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
