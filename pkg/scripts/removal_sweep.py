"""Distribution of the complexity change from removing one block.

For every splitting in the bundled corpus (and, with ``--sums``, random
normal sums) the script takes each side, its components, its product part
and random block subsets, removes every block in turn and tabulates
``c(Y minus B) - c(Y)``.

    python3 scripts/removal_sweep.py --subsets 20 --seed 3
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from collections import Counter

from normkit.blocks import REMOVAL_BOUND, ShrunkenSubmanifold, decompose_blocks
from normkit.cli import data_path
from normkit.geom import realize
from normkit.nsurf import parse_surface
from normkit.tri import parse_triangulation

SPLITTINGS = (
    ("onetet.tri", "onetet_splitting.srf"),
    ("twotet.tri", "twotet_splitting.srf"),
    ("twotet.tri", "twotet_sphere.srf"),
)


def family(X, rng, subsets):
    Y = X.submanifold()
    yield "all", Y
    for i, c in enumerate(Y.components()):
        yield f"component{i}", c
    yield "products", X.submanifold([b.key for b in X.blocks if b.is_product])
    keys = list(X.keys)
    for i in range(subsets):
        yield f"subset{i}", X.submanifold(rng.sample(keys, rng.randint(1, len(keys))))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--subsets", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    hist = Counter()
    worst = None
    for tname, sname in SPLITTINGS:
        T = parse_triangulation(data_path(tname).read_text())
        H = parse_surface(data_path(sname).read_text())
        V, W = decompose_blocks(realize(H, T))
        for X in (V, W):
            for label, Y in family(X, rng, args.subsets):
                for b in Y.blocks:
                    d = ShrunkenSubmanifold(Y.complex, Y.keys - {b.key}).complexity - Y.complexity
                    hist[d] += 1
                    if worst is None or d > worst[0]:
                        worst = (d, sname, X.side, label, list(b.key), b.kind)
    print(json.dumps({"histogram": {str(k): v for k, v in sorted(hist.items())},
                      "bound": REMOVAL_BOUND,
                      "worst": worst}, sort_keys=True))
    return 0 if worst is None or worst[0] <= REMOVAL_BOUND else 1


if __name__ == "__main__":
    sys.exit(main())
