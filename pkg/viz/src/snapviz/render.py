"""Figure layouts over parsed snapshot/report data.

Every layout renders at a fixed figure size and dpi, so output pixel
dimensions depend only on the layout and panel count.  The deviation variant
plots (true - learned) with a symmetric color range at 10% of the true
field's dynamic range.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .formats import Snapshot, read_series, sphere_embedding  # noqa: E402

DPI = 100


class RenderError(ValueError):
    pass


def _new_fig(width, height):
    return plt.figure(figsize=(width, height), dpi=DPI)


def _save(fig, out_path):
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)
    return out_path


def _color_range(values, explicit):
    if explicit is not None:
        return explicit
    return float(values.min()), float(values.max())


def kymograph(paths, out_path, color_range=None, cmap="viridis"):
    """Space-time intensity plot of a 1d field series: one row per snapshot."""
    snaps = read_series(paths)
    if len(snaps[0].shape) != 1:
        raise RenderError("kymograph needs 1d snapshots")
    data = np.stack([s.values for s in snaps])
    x = snaps[0].axis_coords(0)
    lo, hi = _color_range(data, color_range)
    fig = _new_fig(8, 6)
    ax = fig.add_subplot(111)
    im = ax.imshow(data, aspect="auto", origin="lower", cmap=cmap,
                   vmin=lo, vmax=hi,
                   extent=(x[0], x[-1], snaps[0].time, snaps[-1].time))
    ax.set_xlabel("position")
    ax.set_ylabel("time")
    ax.set_title(f"{snaps[0].header['system']} {snaps[0].field}")
    fig.colorbar(im, ax=ax)
    return _save(fig, out_path)


def heatmap(path_or_snap, out_path, color_range=None, cmap="viridis",
            title=None):
    """Single 2d snapshot as an image."""
    snap = path_or_snap if isinstance(path_or_snap, Snapshot) else \
        read_series([path_or_snap])[0]
    if len(snap.shape) != 2:
        raise RenderError("heatmap needs a 2d snapshot")
    lo, hi = _color_range(snap.values, color_range)
    x0 = snap.axis_coords(0)
    x1 = snap.axis_coords(1)
    fig = _new_fig(7, 6)
    ax = fig.add_subplot(111)
    im = ax.imshow(snap.nd, origin="lower", cmap=cmap, vmin=lo, vmax=hi,
                   extent=(x1[0], x1[-1], x0[0], x0[-1]), aspect="auto")
    ax.set_title(title or f"{snap.header['system']} {snap.field} t={snap.time:g}")
    fig.colorbar(im, ax=ax)
    return _save(fig, out_path)


def slices(path, out_path, axis=2, indices=None, color_range=None,
           cmap="viridis"):
    """Planar cuts through a 3d snapshot, one panel per index."""
    snap = read_series([path])[0]
    if len(snap.shape) != 3:
        raise RenderError("slices needs a 3d snapshot")
    n = snap.shape[axis]
    if indices is None:
        indices = [n // 4, 3 * n // 4]
    lo, hi = _color_range(snap.values, color_range)
    fig = _new_fig(5 * len(indices), 5)
    coords = snap.axis_coords(axis)
    for k, idx in enumerate(indices):
        ax = fig.add_subplot(1, len(indices), k + 1)
        cut = np.take(snap.nd, idx, axis=axis)
        im = ax.imshow(cut, origin="lower", cmap=cmap, vmin=lo, vmax=hi,
                       aspect="auto")
        ax.set_title(f"{snap.field} axis{axis}={coords[idx]:g} t={snap.time:g}")
    fig.colorbar(im, ax=fig.axes, fraction=0.05)
    return _save(fig, out_path)


def sphere(path, out_path, color_range=None, cmap="viridis"):
    """Field over a sphere chart rendered on the embedded surface."""
    snap = read_series([path])[0]
    x, y, z = sphere_embedding(snap)
    values = snap.nd
    lo, hi = _color_range(values, color_range)
    span = (hi - lo) or 1.0
    fig = _new_fig(7, 7)
    ax = fig.add_subplot(111, projection="3d")
    colors = plt.get_cmap(cmap)((values - lo) / span)
    ax.plot_surface(x, y, z, facecolors=colors, rstride=1, cstride=1,
                    linewidth=0, antialiased=False, shade=False)
    ax.set_box_aspect((1, 1, 1))
    ax.set_title(f"{snap.header['system']} {snap.field} t={snap.time:g}")
    return _save(fig, out_path)


def _match_by_time(true_snaps, learned_snaps):
    pairs = []
    for t in true_snaps:
        for l in learned_snaps:
            if abs(l.time - t.time) <= 1e-9 * max(1.0, abs(t.time)):
                pairs.append((t, l))
                break
    if not pairs:
        raise RenderError("no matching times between true and learned inputs")
    return pairs


def deviation(true_paths, learned_paths, out_path, cmap="RdBu"):
    """(true - learned) panels with symmetric color range at 10% of the true
    field's dynamic range; grids must match point for point."""
    true_snaps = read_series(true_paths)
    learned_snaps = read_series(learned_paths)
    pairs = _match_by_time(true_snaps, learned_snaps)
    all_true = np.concatenate([t.values for t, _ in pairs])
    limit = 0.1 * (all_true.max() - all_true.min() or 1.0)
    dim = len(pairs[0][0].shape)
    if dim == 1:
        data = np.stack([t.values - l.values for t, l in pairs])
        x = pairs[0][0].axis_coords(0)
        fig = _new_fig(8, 6)
        ax = fig.add_subplot(111)
        im = ax.imshow(data, aspect="auto", origin="lower", cmap=cmap,
                       vmin=-limit, vmax=limit,
                       extent=(x[0], x[-1], pairs[0][0].time, pairs[-1][0].time))
        ax.set_xlabel("position")
        ax.set_ylabel("time")
        fig.colorbar(im, ax=ax)
    elif dim == 2:
        fig = _new_fig(5 * len(pairs), 5)
        for k, (t, l) in enumerate(pairs):
            ax = fig.add_subplot(1, len(pairs), k + 1)
            im = ax.imshow(t.nd - l.nd, origin="lower", cmap=cmap,
                           vmin=-limit, vmax=limit, aspect="auto")
            ax.set_title(f"t={t.time:g}")
        fig.colorbar(im, ax=fig.axes, fraction=0.05)
    else:
        raise RenderError("deviation panels support 1d and 2d snapshots")
    ax = fig.axes[0]
    ax.set_title(f"true - learned ({pairs[0][0].field}), range ±{limit:g}")
    return _save(fig, out_path)


def loss_curve(epochs, losses, out_path):
    fig = _new_fig(7, 5)
    ax = fig.add_subplot(111)
    ax.semilogy(epochs, losses)
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, out_path)


def mse_table(records, out_path):
    """Report records as a rendered table image."""
    rows = [(r["field"], f"{r['time']:g}", r["metric"], f"{r['value']:.3e}")
            for r in records]
    fig = _new_fig(6, 1 + 0.3 * max(1, len(rows)))
    ax = fig.add_subplot(111)
    ax.axis("off")
    table = ax.table(cellText=rows,
                     colLabels=("field", "time", "metric", "value"),
                     loc="center")
    table.scale(1, 1.2)
    return _save(fig, out_path)
