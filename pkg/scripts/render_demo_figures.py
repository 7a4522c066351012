#!/usr/bin/env python3
"""Render images for a finished demo run directory using the snapviz package.

Usage: python scripts/render_demo_figures.py runs/fig2 [--outdir figures]

Picks layouts by inspecting the snapshot files present: kymographs plus a
deviation panel for 1d runs, heatmaps for 2d, slice panels for 3d, surface
renders for sphere charts, plus the loss curve and the MSE table.
"""

import argparse
import glob
import os
import sys

from snapviz import formats, render


def series(rundir, tag, field):
    return sorted(glob.glob(os.path.join(rundir, f"{tag}_{field}_*.snap")))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("rundir")
    ap.add_argument("--outdir", default=None)
    args = ap.parse_args(argv)
    outdir = args.outdir or os.path.join(args.rundir, "figures")
    os.makedirs(outdir, exist_ok=True)

    any_true = sorted(glob.glob(os.path.join(args.rundir, "true_*_000000.snap")))
    if not any_true:
        print(f"no snapshots in {args.rundir}", file=sys.stderr)
        return 2
    fields = sorted({os.path.basename(p).split("_")[1] for p in any_true})
    first = formats.read_snapshot(any_true[0])
    dim = len(first.shape)
    kind = first.header["chart_kind"]

    for field in fields:
        true_paths = series(args.rundir, "true", field)
        learned_paths = series(args.rundir, "learned", field)
        pairs = [("true", true_paths), ("learned", learned_paths)]
        for tag, paths in pairs:
            if not paths:
                continue
            out = os.path.join(outdir, f"{tag}_{field}.png")
            if kind.startswith("sphere"):
                render.sphere(paths[-1], out)
            elif dim == 1:
                render.kymograph(paths, out)
            elif dim == 2:
                render.heatmap(paths[-1], out)
            else:
                render.slices(paths[-1], out)
        if true_paths and learned_paths and dim <= 2 and not kind.startswith("sphere"):
            render.deviation(true_paths, learned_paths,
                             os.path.join(outdir, f"deviation_{field}.png"))

    loss = os.path.join(args.rundir, "loss.csv")
    if os.path.exists(loss):
        epochs, values = formats.read_loss_log(loss)
        render.loss_curve(epochs, values, os.path.join(outdir, "loss.png"))
    for report in glob.glob(os.path.join(args.rundir, "*.report")):
        _, records = formats.read_report(report)
        name = os.path.splitext(os.path.basename(report))[0]
        render.mse_table(records, os.path.join(outdir, f"{name}_table.png"))
    print(outdir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
