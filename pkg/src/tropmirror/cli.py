"""Command line surface.

Commands: diagram validate|render|slide|branch-move, series val|restrict|
wallcross, mirror glue|monodromy|hartogs|cocycle, complex torsion|
boundary-depth, check <suite>.  Exit codes: 0 pass, 1 check failure,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import suites
from .diagrams import EigenrayDiagram
from .errors import TropmirrorError, UnknownSuite
from .filtered import FilteredComplex
from .gluing import (
    CoverElement,
    cocycle_check,
    glue_sections,
    monodromy_transport,
)
from .local_model import WallCrossSpec, polygon_Pa, wall_cross_series
from .nodal import NodalPolygon, NodeFrame, auto_strips
from .novikov import NovikovScalar
from .polytopes import RationalPolygon
from .qmath import NEG_INF, Q, fmt_q, parse_q
from .render import render_diagram
from .reports import RunReport
from .series import LatticeSeries, eta, xi


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_series(path: str, polygon_path: str | None) -> LatticeSeries:
    text = _read(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return LatticeSeries.from_json(json.loads(text))
    if polygon_path is None:
        raise TropmirrorError("text-form series needs --polygon")
    poly = RationalPolygon.from_json(json.loads(_read(polygon_path)))
    return LatticeSeries.parse(text, poly)


def cmd_diagram(args) -> int:
    text = _read(args.file)
    diagram = EigenrayDiagram.parse(text)
    if args.action == "validate":
        _write("diagram ok\n" if args.format != "json" else '{"valid": true}\n', args.out)
        return 0
    if args.action == "render":
        overlays = []
        if args.overlay:
            for spec in args.overlay:
                kind, _, params = spec.partition(":")
                if kind != "Pa":
                    raise TropmirrorError(f"unknown overlay {kind!r}")
                kv = dict(p.split("=") for p in params.split(","))
                overlays.append(polygon_Pa(int(kv["k"]), parse_q(kv["a"])))
        strips = auto_strips(diagram) if args.strips else None
        _write(render_diagram(diagram, overlays, strips), args.out)
        return 0
    if args.action == "slide":
        moved = diagram.nodal_slide(args.ray, args.node, parse_q(args.offset))
        _write(json.dumps(moved.to_json(), indent=2) + "\n", args.out)
        return 0
    if args.action == "branch-move":
        moved = diagram.branch_move(args.ray)
        _write(json.dumps(moved.to_json(), indent=2) + "\n", args.out)
        return 0
    raise UnknownSuite(args.action)


def cmd_series(args) -> int:
    f = _load_series(args.file, args.polygon)
    if args.action == "val":
        v = f.val()
        _write(
            json.dumps({"val": fmt_q(v.value), "exact": v.exact}) + "\n"
            if args.format == "json"
            else f"val_P = {v}\n",
            args.out,
        )
        return 0
    if args.action == "restrict":
        target = RationalPolygon.from_json(json.loads(_read(args.to)))
        g = f.restrict(target)
        _write(json.dumps(g.to_json(), indent=2) + "\n", args.out)
        return 0
    if args.action == "wallcross":
        side = "upper" if args.side == "upper" else "lower"
        spec = WallCrossSpec(args.k, side, parse_q(args.cutoff), f.reference)
        g = wall_cross_series(spec, f)
        _write(json.dumps(g.to_json(), indent=2) + "\n", args.out)
        return 0
    raise UnknownSuite(args.action)


def cmd_mirror(args) -> int:
    if args.action == "glue":
        bundle = json.loads(_read(args.file))
        frame_poly = NodalPolygon.from_json(bundle["cover"][0]["polygon"])
        frame = frame_poly.frame or NodeFrame.standard(args.k)
        cover = [
            CoverElement(NodalPolygon.from_json(c["polygon"]), c["tag"])
            for c in bundle["cover"]
        ]
        locals_ = [LatticeSeries.from_json(s) for s in bundle["locals"]]
        diagram = (
            EigenrayDiagram.from_json(bundle["diagram"])
            if "diagram" in bundle
            else EigenrayDiagram.standard(args.k)
        )
        section = glue_sections(frame, cover, locals_, diagram, parse_q(args.cutoff))
        payload = {
            "glued": True,
            "certificates": [
                {
                    "pair": list(c.pair),
                    "half": c.half,
                    "depth": fmt_q(c.depth),
                    "terms": c.terms_checked,
                }
                for c in section.certificates
            ],
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    if args.action == "monodromy":
        upper = RationalPolygon.from_vertices([(-1, 1), (1, 1), (-1, 2), (1, 2)])
        lower = RationalPolygon.from_vertices([(-1, -2), (1, -2), (-1, -1), (1, -1)])
        f = xi(upper) if args.series is None else _load_series(args.series, args.polygon)
        res = monodromy_transport(args.k, f, parse_q(args.cutoff), upper, lower)
        payload = {
            "transported": str(res.transported),
            "relabeled": str(res.relabeled),
            "trivial": res.trivial,
            "closes": res.closes,
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
        return 0 if res.closes else 1
    if args.action == "hartogs":
        report = suites.run_suite("hartogs", seed=args.seed)
        return _emit_report(report, args)
    if args.action == "cocycle":
        report = suites.run_suite(
            "cocycle", seed=args.seed, samples=args.samples, ks=(args.k,)
        )
        return _emit_report(report, args)
    raise UnknownSuite(args.action)


def cmd_complex(args) -> int:
    cx = FilteredComplex.from_json(json.loads(_read(args.file)))
    degree = args.degree
    if args.action == "torsion":
        t = cx.max_torsion(degree)
        value = "-inf" if t == NEG_INF else fmt_q(t)
        _write(
            json.dumps({"degree": degree, "max_torsion": value}) + "\n"
            if args.format == "json"
            else f"max torsion in degree {degree}: {value}\n",
            args.out,
        )
        return 0
    if args.action == "boundary-depth":
        b = cx.boundary_depth(degree)
        _write(
            json.dumps({"degree": degree, "boundary_depth": fmt_q(b)}) + "\n"
            if args.format == "json"
            else f"boundary depth in degree {degree}: {fmt_q(b)}\n",
            args.out,
        )
        return 0
    raise UnknownSuite(args.action)


def cmd_check(args) -> int:
    kwargs = {}
    if args.suite == "torsion" and args.instances:
        kwargs["instances"] = args.instances
    if args.suite == "cocycle" and args.samples:
        kwargs["samples"] = args.samples
    if args.suite in ("wallcross", "monodromy") and args.k:
        kwargs["k_max"] = args.k
    if args.cutoff and args.suite in ("wallcross", "monodromy"):
        kwargs["cutoff"] = parse_q(args.cutoff)
    report = suites.run_suite(args.suite, seed=args.seed, **kwargs)
    return _emit_report(report, args)


def _emit_report(report: RunReport, args) -> int:
    text = report.to_json() if args.format == "json" else report.to_text()
    _write(text, args.out)
    return report.exit_code


def _add_common(p):
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=["json", "text", "svg"], default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", default="8")
    p.add_argument("--k", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tropmirror",
        description="Exact mirror machinery for nodal integral affine surfaces",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pd = sub.add_parser("diagram", help="eigenray diagram operations")
    pd.add_argument("action", choices=["validate", "render", "slide", "branch-move"])
    pd.add_argument("file")
    pd.add_argument("--ray", type=int, default=0)
    pd.add_argument("--node", type=int, default=0)
    pd.add_argument("--offset", default="0")
    pd.add_argument("--overlay", action="append", help="e.g. Pa:k=1,a=1")
    pd.add_argument("--strips", action="store_true")
    _add_common(pd)
    pd.set_defaults(func=cmd_diagram)

    ps = sub.add_parser("series", help="lattice series operations")
    ps.add_argument("action", choices=["val", "restrict", "wallcross"])
    ps.add_argument("file")
    ps.add_argument("--polygon", help="polygon JSON for text-form series")
    ps.add_argument("--to", help="target polygon JSON for restrict")
    ps.add_argument("--side", choices=["upper", "lower"], default="upper")
    _add_common(ps)
    ps.set_defaults(func=cmd_series)

    pm = sub.add_parser("mirror", help="glued-section operations")
    pm.add_argument("action", choices=["glue", "monodromy", "hartogs", "cocycle"])
    pm.add_argument("file", nargs="?")
    pm.add_argument("--series")
    pm.add_argument("--polygon")
    pm.add_argument("--samples", type=int, default=500)
    _add_common(pm)
    pm.set_defaults(func=cmd_mirror)

    pc = sub.add_parser("complex", help="filtered complex computations")
    pc.add_argument("action", choices=["torsion", "boundary-depth"])
    pc.add_argument("file")
    pc.add_argument("--degree", type=int, default=1)
    _add_common(pc)
    pc.set_defaults(func=cmd_complex)

    pk = sub.add_parser("check", help="run a named invariant suite")
    pk.add_argument("suite", choices=sorted(suites.SUITES))
    pk.add_argument("--instances", type=int)
    pk.add_argument("--samples", type=int)
    _add_common(pk)
    pk.set_defaults(func=cmd_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TropmirrorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
