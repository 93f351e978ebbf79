#!/usr/bin/env python3
"""Classify every gallery cell on both routes and print the resulting table.

Usage: python scripts/gallery_table.py [--k-cap 6]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from singclass.classify import classify_point
from singclass.gallery import gallery_map


def table_cells():
    for k in range(1, 6):
        for dimz in (0, 2):
            yield "whitney", {"k": k, "dimZ": dimz}
    for k in range(0, 4):
        for n in range(0, k + 4):
            yield "family_kn", {"k": k, "n": n, "dimZ": 1}
    yield "fold_t2", {}
    yield "cusp_source_t3", {}
    for N in (2, 3, 4):
        yield "l2_truncated", {"N": N}
    yield "eps_perturbed", {"eps": 0.0}
    yield "eps_perturbed", {"eps": 0.1}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--k-cap", type=int, default=6)
    args = parser.parse_args()

    started = time.monotonic()
    bad = 0
    print(f"{'map':34s} {'point':>6s}  {'expected':26s} {'computed':26s} ok")
    for name, params in table_cells():
        entry = gallery_map(name, params)
        for exp in entry.expected:
            for i, point in enumerate(exp.points):
                c = classify_point(entry.model, np.array(point), k_cap=args.k_cap, route="both")
                expected = exp.kind if exp.k is None else f"{exp.kind}({exp.k})"
                ok = (c.kind, c.k) == (exp.kind, exp.k) and c.evidence.route_agreement is not False
                bad += not ok
                print(f"{entry.model.label:34s} {('#%d' % i):>6s}  {expected:26s} {c.describe():26s} {'yes' if ok else 'NO'}")
    print(f"\n{bad} misclassifications, {time.monotonic() - started:.1f}s total")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
