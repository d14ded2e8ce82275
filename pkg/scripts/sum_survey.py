"""Exchange curves of random Haken sums over the bundled triangulations.

Sums are combinations of vertex surfaces that respect one quad type per
tetrahedron.  For each pair the script traces J ∩ K, classifies the bands,
runs the regular switch and the irregular-exchange comparison, and prints
one JSON line; a summary line closes the output.

    python3 scripts/sum_survey.py --count 200 --seed 1
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from collections import Counter

from normkit.cli import data_path
from normkit.enumerate import enumerate_vertex_surfaces
from normkit.geom import (
    classify_bands,
    disk_patch_diagnostic,
    irregular_exchange_weights,
    realize,
    regular_switch,
    trace_intersections,
)
from normkit.nsurf import NormalSurfaceVector, haken_sum
from normkit.tri import parse_triangulation

NAMES = ("unglued.tri", "doubled_tet.tri", "onetet.tri", "twotet.tri")


def random_pair(rng, tri, verts, top=2):
    while True:
        choice = [rng.choice([None, 0, 1, 2]) for _ in range(tri.tet_count)]
        pool = [s for s in verts
                if all(not s.coords[7 * a + 4 + k] or k == q for a, q in enumerate(choice) for k in range(3))]
        if pool:
            break
    out = []
    for _ in range(2):
        picks = rng.sample(pool, min(3, len(pool)))
        coeffs = [rng.randint(1, top) for _ in picks]
        out.append(NormalSurfaceVector(tuple(sum(c * s.coords[i] for c, s in zip(coeffs, picks))
                                             for i in range(7 * tri.tet_count))))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-reduce", action="store_true")
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    tris = {n: parse_triangulation(data_path(n).read_text()) for n in NAMES}
    verts = {n: enumerate_vertex_surfaces(t, cap=6).surfaces for n, t in tris.items()}
    totals = Counter()
    for i in range(args.count):
        name = NAMES[i % len(NAMES)]
        T = tris[name]
        J, K = random_pair(rng, T, verts[name])
        Jr, Kr = realize(J, T), realize(K, T)
        curves = trace_intersections(Jr, Kr, reduce=not args.no_reduce)
        report = classify_bands(curves)
        Fr = regular_switch(Jr, Kr, report, curves)
        irregular = [irregular_exchange_weights(curves, c.id) for c in curves if c.closed]
        row = {
            "triangulation": name,
            "J": list(J.coords),
            "K": list(K.coords),
            "kinds": dict(Counter(report.kinds.values())),
            "disk_patches": len(disk_patch_diagnostic(report)),
            "crossings": [report.placement["initial_crossings"], report.placement["final_crossings"]],
            "switch_ok": Fr.coords().coords == haken_sum(J, K, T).coords,
            "irregular_non_normal": sum(any(not c["normal"] for c in w["components"]) for w in irregular),
        }
        print(json.dumps(row, sort_keys=True))
        totals.update(report.kinds.values())
        totals["pairs"] += 1
        totals["switch_failures"] += not row["switch_ok"]
        totals["pairs_with_disk_patches"] += row["disk_patches"] > 0
        totals["crossings_removed"] += row["crossings"][0] - row["crossings"][1]
    print(json.dumps({"summary": dict(sorted(totals.items()))}, sort_keys=True))
    return 1 if totals["switch_failures"] else 0


if __name__ == "__main__":
    sys.exit(main())
