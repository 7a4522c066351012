"""snapviz command line: render simulation output files to images, or dump
the parsed arrays back out bit for bit."""

from __future__ import annotations

import argparse
import sys

from . import formats, render

LAYOUTS = ("kymograph", "heatmap", "slices", "sphere", "deviation",
           "loss-curve", "mse-table")


def _build_parser():
    p = argparse.ArgumentParser(prog="snapviz")
    p.add_argument("layout", choices=LAYOUTS)
    p.add_argument("inputs", nargs="+", help="snapshot/report/loss files")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--learned", nargs="*", default=None,
                   help="learned-side snapshots (deviation layout)")
    p.add_argument("--color-range", default=None,
                   help="lo,hi explicit color range")
    p.add_argument("--cmap", default=None)
    p.add_argument("--slice-axis", type=int, default=2)
    p.add_argument("--slice-indices", default=None,
                   help="comma-separated indices along the slice axis")
    p.add_argument("--dump", default=None,
                   help="also write the parsed arrays as raw little-endian "
                        "float64 to this path")
    return p


def _dump(paths, dump_path):
    with open(dump_path, "wb") as fh:
        for path in paths:
            snap = formats.read_snapshot(path)
            fh.write(snap.values.astype("<f8").tobytes())


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    crange = None
    if args.color_range:
        lo, hi = args.color_range.split(",")
        crange = (float(lo), float(hi))
    try:
        if args.layout == "kymograph":
            render.kymograph(args.inputs, args.out, color_range=crange,
                             cmap=args.cmap or "viridis")
        elif args.layout == "heatmap":
            render.heatmap(args.inputs[0], args.out, color_range=crange,
                           cmap=args.cmap or "viridis")
        elif args.layout == "slices":
            indices = None
            if args.slice_indices:
                indices = [int(s) for s in args.slice_indices.split(",")]
            render.slices(args.inputs[0], args.out, axis=args.slice_axis,
                          indices=indices, color_range=crange,
                          cmap=args.cmap or "viridis")
        elif args.layout == "sphere":
            render.sphere(args.inputs[0], args.out, color_range=crange,
                          cmap=args.cmap or "viridis")
        elif args.layout == "deviation":
            if not args.learned:
                print("deviation layout needs --learned files", file=sys.stderr)
                return 2
            render.deviation(args.inputs, args.learned, args.out,
                             cmap=args.cmap or "RdBu")
        elif args.layout == "loss-curve":
            epochs, losses = formats.read_loss_log(args.inputs[0])
            render.loss_curve(epochs, losses, args.out)
        elif args.layout == "mse-table":
            _, records = formats.read_report(args.inputs[0])
            render.mse_table(records, args.out)
        if args.dump:
            snapshot_inputs = list(args.inputs) + list(args.learned or [])
            if args.layout in ("loss-curve", "mse-table"):
                snapshot_inputs = []
            _dump(snapshot_inputs, args.dump)
    except (formats.SnapFormatError, render.RenderError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 4
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
