"""Command line entry point: ``normkit <command> ...``.

Every command prints (or writes with ``--out``) a JSON report with sorted
keys, a schema tag, the package version, the seed and sha256 digests of
the input files.  Exit status is 0 on success, 1 when a check fails and 2
on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .blocks import BlockError, core_block_bound, count_core_blocks, decompose_blocks, remove_block
from .bounds import all_bounds, derived_triangulation_bounds, fundamental_bounds, genus_threshold
from .enumerate import check_fundamental_bounds, enumerate_vertex_surfaces
from .geom import (
    GeometryError,
    classify_bands,
    disk_patch_diagnostic,
    irregular_exchange_weights,
    parallel_families_consecutive,
    realization_violations,
    realize,
    regular_switch,
    surface_components,
    trace_intersections,
)
from .nsurf import (
    SurfaceError,
    arc_count,
    boundary_weight,
    compatible,
    euler_characteristic,
    haken_sum,
    parse_surface,
    serialize_surface,
    surface_to_dict,
    validate_surface,
    weight,
)
from .pipeline import PipelineError, run_pipeline
from .surf import sweep
from .tri import TriangulationError, parse_triangulation, validate

SCHEMA = "normkit-report/1"
log = logging.getLogger("normkit")


class UsageError(Exception):
    """Bad input: reported with exit status 2."""


@dataclass
class Outcome:
    result: dict
    ok: bool = True


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x, key=repr)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def data_path(name: str) -> Path:
    """Path of a bundled corpus file."""
    return Path(str(resources.files("normkit") / "data" / name))


def _read(path: str, inputs: dict) -> str:
    p = Path(path)
    if not p.is_file():
        alt = data_path(path)
        if not alt.is_file():
            raise UsageError(f"no such file: {path}")
        p = alt
    raw = p.read_bytes()
    inputs[p.name] = hashlib.sha256(raw).hexdigest()
    return raw.decode()


def _tri(args, inputs):
    try:
        return parse_triangulation(_read(args.tri, inputs))
    except TriangulationError as exc:
        raise UsageError(f"malformed triangulation {args.tri}: {exc}") from None


def _surface(path, inputs):
    try:
        return parse_surface(_read(path, inputs))
    except SurfaceError as exc:
        raise UsageError(f"malformed surface {path}: {exc}") from None


def _need_valid(s, tri, label):
    rep = validate_surface(s, tri)
    if not rep.ok:
        raise UsageError(f"{label} is not a valid surface: {'; '.join(rep.violations)}")


# -- commands ------------------------------------------------------------------------


def cmd_validate(args, inputs) -> Outcome:
    text = _read(args.tri, inputs)
    try:
        tri = parse_triangulation(text, strict=False)
    except TriangulationError as exc:
        raise UsageError(f"malformed triangulation {args.tri}: {exc}") from None
    rep = validate(tri)
    if not rep.ok:
        return Outcome({"triangulation": rep.as_dict(), "tet_count": tri.tet_count}, False)
    res = {"triangulation": rep.as_dict(), "tet_count": tri.tet_count,
           "closed": tri.is_closed,
           "edge_degrees": list(tri.skeleta.edge_degrees),
           "vertex_classes": len(tri.skeleta.vertex_classes),
           "face_classes": len(tri.skeleta.face_classes)}
    ok = True
    if args.surface:
        s = _surface(args.surface, inputs)
        srep = validate_surface(s, tri)
        res["surface"] = {"valid": srep.ok, "violations": list(srep.violations)}
        ok &= srep.ok
    return Outcome(res, ok)


def _surface_stats(s, tri) -> dict:
    r = realize(s, tri)
    return {
        "surface": surface_to_dict(s),
        "weight": weight(s, tri),
        "boundary_weight": boundary_weight(s, tri),
        "arc_count": arc_count(s, tri),
        "euler_characteristic": euler_characteristic(s, tri),
        "components": len(surface_components(r)),
        "realization_violations": realization_violations(r),
        "parallel_families_consecutive": parallel_families_consecutive(r),
        "fundamental_bounds": check_fundamental_bounds(s, tri),
    }


def cmd_surface(args, inputs) -> Outcome:
    tri = _tri(args, inputs)
    s = _surface(args.surface, inputs)
    rep = validate_surface(s, tri)
    res = {"valid": rep.ok, "violations": list(rep.violations)}
    if rep.ok:
        res.update(_surface_stats(s, tri))
        ok = not res["realization_violations"]
    else:
        ok = False
    return Outcome(res, ok)


def cmd_sum(args, inputs) -> Outcome:
    tri = _tri(args, inputs)
    J, K = _surface(args.a, inputs), _surface(args.b, inputs)
    _need_valid(J, tri, args.a)
    _need_valid(K, tri, args.b)
    if not compatible(J, K, tri):
        return Outcome({"compatible": False}, False)
    F = haken_sum(J, K, tri)
    Jr, Kr = realize(J, tri), realize(K, tri)
    curves = trace_intersections(Jr, Kr, reduce=not args.no_reduce)
    report = classify_bands(curves)
    Fr = regular_switch(Jr, Kr, report, curves)
    checks = {
        "weight_additive": weight(F, tri) == weight(J, tri) + weight(K, tri),
        "euler_additive": euler_characteristic(F, tri) == euler_characteristic(J, tri) + euler_characteristic(K, tri),
        "switch_matches_sum": Fr.coords().coords == F.coords,
        "bands_match_rule": all(report.kinds[c.id] == ("rectangle" if not c.closed else
                                                      "annulus" if c.orientation_J == "preserving" else "mobius")
                                for c in report.curves),
        "seams_orientation_preserving": all(s["core"] != "reversing" for s in report.seams),
    }
    res = {
        "compatible": True,
        "sum": surface_to_dict(F),
        "weights": {"J": weight(J, tri), "K": weight(K, tri), "sum": weight(F, tri)},
        "euler": {"J": euler_characteristic(J, tri), "K": euler_characteristic(K, tri),
                  "sum": euler_characteristic(F, tri)},
        "bands": report.as_dict(),
        "disk_patches": [p.id for p in disk_patch_diagnostic(report)],
        "irregular_exchanges": [irregular_exchange_weights(curves, c.id) for c in curves if c.closed],
        "checks": checks,
    }
    return Outcome(res, all(checks.values()))


def cmd_enumerate(args, inputs) -> Outcome:
    tri = _tri(args, inputs)
    result = enumerate_vertex_surfaces(tri, args.cap)
    text = "".join(serialize_surface(s) for s in result.surfaces)
    if args.out:
        Path(args.out).write_text(text)
    rows = []
    for s in result.surfaces:
        b = check_fundamental_bounds(s, tri)
        rows.append({"name": s.name, "coords": list(s.coords), "weight": b["weight"],
                     "euler_characteristic": b["euler_characteristic"], "bounds_ok": b["ok"]})
    res = {"cap": args.cap, "complete": result.complete, "skipped": result.skipped,
           "count": len(rows), "surfaces": rows, "text": text}
    return Outcome(res, all(r["bounds_ok"] for r in rows))


def _splitting(args, inputs):
    tri = _tri(args, inputs)
    s = _surface(args.surface, inputs)
    _need_valid(s, tri, args.surface)
    return tri, s


def cmd_blocks(args, inputs) -> Outcome:
    tri, s = _splitting(args, inputs)
    try:
        V, W = decompose_blocks(realize(s, tri))
    except BlockError as exc:
        return Outcome({"error": str(exc)}, False)
    res = {"core_block_bound": core_block_bound(tri.tet_count)}
    ok = True
    for X in (V, W):
        side = X.as_dict()
        try:
            side["core_blocks"] = count_core_blocks(X)
        except BlockError as exc:
            side["core_blocks"] = str(exc)
            ok = False
        Y = X.submanifold()
        side["submanifold"] = Y.as_dict()
        deltas = []
        for comp in Y.components():
            for b in comp.blocks:
                _, rep = remove_block(comp, b)
                deltas.append(rep.delta)
        side["max_removal_delta"] = max(deltas) if deltas else None
        ok &= all(b.rectangles <= 8 for b in X.blocks if not b.is_product)
        ok &= all(b.rectangles in (3, 4) for b in X.blocks if b.is_product)
        res[X.side] = side
    return Outcome(res, ok)


def cmd_pipeline(args, inputs) -> Outcome:
    tri, s = _splitting(args, inputs)
    try:
        result = run_pipeline(realize(s, tri))
    except (BlockError, PipelineError) as exc:
        return Outcome({"error": str(exc)}, False)
    return Outcome(result.as_dict(), result.ok)


def cmd_bounds(args, inputs) -> Outcome:
    t = args.t
    if t < 1:
        raise UsageError("--t must be at least 1")
    res = {
        "t": t,
        "table": all_bounds(t),
        "genus_threshold": genus_threshold(t).as_dict(),
        "fundamental": fundamental_bounds(t).as_dict(),
        "derived": derived_triangulation_bounds(t).as_dict(),
    }
    ok = all(c["holds"] for c in res["derived"]["checks"])
    return Outcome(res, ok)


def cmd_surfcheck(args, inputs) -> Outcome:
    res = sweep(args.count, args.seed)
    return Outcome(res, not res["failures"])


COMMANDS = {
    "validate": cmd_validate,
    "surface": cmd_surface,
    "sum": cmd_sum,
    "enumerate": cmd_enumerate,
    "blocks": cmd_blocks,
    "pipeline": cmd_pipeline,
    "bounds": cmd_bounds,
    "surfcheck": cmd_surfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normkit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"normkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_, tri=True, out="write the JSON report here instead of stdout"):
        p = sub.add_parser(name, help=help_)
        if tri:
            p.add_argument("--tri", required=True, help="triangulation file (or bundled corpus name)")
        p.add_argument("--out", help=out)
        p.add_argument("--seed", type=int, default=0, help="recorded in the report; used by randomized commands")
        return p

    p = add("validate", "check a triangulation and optionally a surface")
    p.add_argument("--surface")
    p = add("surface", "weights, Euler characteristic and realization of a surface")
    p.add_argument("--surface", required=True)
    p = add("sum", "Haken sum with exchange band analysis")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--no-reduce", action="store_true", help="keep removable intersection curves")
    p = add("enumerate", "vertex normal surfaces", out="write the surfaces here in the text format")
    p.add_argument("--cap", type=int, default=1000)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p = add("blocks", "block decomposition of a splitting")
    p.add_argument("--surface", required=True)
    p = add("pipeline", "V1, W2, Z2, Y1, section surface and Theta graph")
    p.add_argument("--surface", required=True)
    p = add("bounds", "table of every named bound", tri=False)
    p.add_argument("--t", type=int, required=True)
    p = add("surfcheck", "random subsurface monotonicity instances", tri=False)
    p.add_argument("--count", type=int, default=10_000)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    inputs: dict = {}
    try:
        outcome = COMMANDS[args.command](args, inputs)
    except UsageError as exc:
        print(f"normkit {args.command}: {exc}", file=sys.stderr)
        return 2
    except (GeometryError, SurfaceError, TriangulationError) as exc:
        print(f"normkit {args.command}: {exc}", file=sys.stderr)
        return 2
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "inputs": inputs,
        "ok": outcome.ok,
        "result": outcome.result,
    }
    text = dumps(report)
    dest = args.report if args.command == "enumerate" else args.out
    if dest:
        Path(dest).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
