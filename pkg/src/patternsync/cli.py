"""Command line driver: apply edit scripts, compare flattening modes, serve.

Exit codes: 0 success, 1 input/document errors, 2 edit failures (with the
failing op index).
"""

import argparse
import json
import sys

import numpy as np

from . import formats
from .document import apply_edit
from .editops import EditOp
from .errors import PatternSyncError
from .flatten import build_tangent_constraints, flatten_uniform
from .geometry import Mesh3, Panel


def _load_inputs(doc_path, script_path):
    with open(doc_path, "rb") as f:
        doc = formats.load_document(f.read())
    with open(script_path, "rb") as f:
        records = formats.load_script(f.read())
    return doc, records


def _apply_script(doc, records, asap):
    """Replay a script, reporting failures as (1-based op index, error)."""
    traces = []
    for n, rec in enumerate(records, start=1):
        try:
            result = apply_edit(doc, EditOp(rec["kind"], rec["params"]),
                                mirror=rec.get("mirror", False),
                                asap_override=asap)
        except PatternSyncError as e:
            raise OpFailure(n, e)
        doc = result.document
        traces.append({"op": n, "kind": rec["kind"],
                       "energies": {str(pid): tr
                                    for pid, tr in sorted(result.traces.items())}})
    return doc, traces


class OpFailure(Exception):
    def __init__(self, index, error):
        super().__init__(f"op {index}: {type(error).__name__}")
        self.index = index
        self.error = error


def cmd_apply(args):
    doc, records = _load_inputs(args.document, args.script)
    doc, traces = _apply_script(doc, records, args.asap)
    with open(args.output, "wb") as f:
        f.write(formats.save_document(doc))
    if args.trace:
        with open(args.output + ".trace.json", "w") as f:
            json.dump(traces, f, indent=2, sort_keys=True)
    if args.svg:
        with open(args.output + ".svg", "wb") as f:
            f.write(formats.export_pattern_svg(doc.panels))
    return 0


def _panel_submesh(doc, pid):
    """Garment sub-mesh aligned with the panel's triangle list."""
    panel = doc.panels[pid]
    return Mesh3(doc.garment.vertices[panel.corr], panel.triangles,
                 np.full(len(panel.triangles), pid, dtype=np.int64))


def _hausdorff(points_a, points_b):
    """Symmetric Hausdorff distance between two closed boundary polylines."""

    def directed(pts, poly):
        worst = 0.0
        segs = list(zip(poly, np.roll(poly, -1, axis=0)))
        for p in pts:
            best = min(_point_segment(p, a, b) for a, b in segs)
            worst = max(worst, best)
        return worst

    return max(directed(points_a, points_b), directed(points_b, points_a))


def _point_segment(p, a, b):
    d = b - a
    t = np.clip(((p - a) @ d) / max(d @ d, 1e-30), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * d)))


def _max_tangent_residual(original, updated):
    worst = 0.0
    for i_prev, i_next, dx, dy in build_tangent_constraints(original):
        delta = updated.vertices2d[i_next] - updated.vertices2d[i_prev]
        worst = max(worst, abs(float(delta[0] * dy - delta[1] * dx)))
    return worst


def cmd_compare(args):
    base, records = _load_inputs(args.document, args.script)
    edited, _ = _apply_script(base, records, args.asap)
    report = {"panels": {}}
    for pid in sorted(edited.panels):
        updated = edited.panels[pid]
        original = base.panels.get(pid)
        coords, _ = flatten_uniform(_panel_submesh(edited, pid),
                                    updated.vertices2d)
        uniform = Panel(coords, updated.triangles, updated.boundary,
                        updated.corr)
        entry = {
            "area_uniform_ratio": None,
            "area_scale_preserving_ratio": None,
            "boundary_hausdorff_cm": None,
            "max_tangent_residual": None,
        }
        if original is not None:
            entry["area_scale_preserving_ratio"] = updated.area() / original.area()
            entry["area_uniform_ratio"] = uniform.area() / original.area()
            entry["boundary_hausdorff_cm"] = _hausdorff(
                updated.vertices2d[updated.boundary],
                original.vertices2d[original.boundary])
            entry["max_tangent_residual"] = _max_tangent_residual(original, updated)
        else:
            entry["area_uniform_ratio"] = uniform.area() / updated.area()
        report["panels"][str(pid)] = entry
    with open(args.output, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    return 0


def cmd_serve(args):
    with open(args.document, "rb") as f:
        doc_bytes = f.read()
    formats.load_document(doc_bytes)  # fail before binding
    import uvicorn

    from .service import create_app

    app = create_app(doc_bytes)
    try:
        uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    except (OSError, SystemExit) as e:
        print(f"serve failed: {e}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="patternsync")
    sub = parser.add_subparsers(dest="command", required=True)

    p_apply = sub.add_parser("apply", help="replay an edit script on a document")
    p_apply.add_argument("document")
    p_apply.add_argument("script")
    p_apply.add_argument("output")
    p_apply.add_argument("--trace", action="store_true",
                         help="write per-op solver energy traces")
    p_apply.add_argument("--svg", action="store_true",
                         help="also export the pattern as SVG")
    p_apply.add_argument("--asap", choices=["auto", "on", "off"], default="auto")
    p_apply.set_defaults(func=cmd_apply)

    p_cmp = sub.add_parser("compare",
                           help="apply a script, then compare scale-preserving "
                                "vs uniform flattening per panel")
    p_cmp.add_argument("document")
    p_cmp.add_argument("script")
    p_cmp.add_argument("output")
    p_cmp.add_argument("--asap", choices=["auto", "on", "off"], default="auto")
    p_cmp.set_defaults(func=cmd_compare)

    p_serve = sub.add_parser("serve", help="serve a document over HTTP")
    p_serve.add_argument("document")
    p_serve.add_argument("--port", type=int, default=8023)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "asap", "auto") == "auto":
        args.asap = None
    try:
        return args.func(args)
    except OpFailure as e:
        print(str(e), file=sys.stderr)
        return 2
    except (PatternSyncError, OSError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
