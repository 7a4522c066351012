"""Standalone readers for the simulation output formats.

The renderer deliberately reparses the documented on-disk layout instead of
importing the simulation package: a UTF-8 `key: value` header introduced by a
magic line and closed by `---`, followed by either little-endian float64
(`encoding: raw64`) or one decimal per line (`encoding: csv`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

SNAP_MAGIC = "CFSNAP 1"
REPORT_MAGIC = "CFREPORT 1"


class SnapFormatError(ValueError):
    pass


def read_blob(path, magic):
    with open(path, "rb") as fh:
        blob = fh.read()
    cut = blob.find(b"\n---\n")
    if cut < 0:
        raise SnapFormatError(f"{path}: missing header terminator")
    lines = blob[:cut].decode("utf-8").split("\n")
    if lines[0] != magic:
        raise SnapFormatError(f"{path}: expected {magic!r}, found {lines[0]!r}")
    header = {}
    for line in lines[1:]:
        key, _, value = line.partition(": ")
        header[key] = value
    return header, blob[cut + 5:]


@dataclass
class Snapshot:
    header: dict
    values: np.ndarray  # flat, row-major
    raw_payload: bytes

    @property
    def shape(self):
        return tuple(int(v) for v in self.header["grid_n"].split())

    @property
    def nd(self):
        return self.values.reshape(self.shape)

    @property
    def time(self):
        return float(self.header["time"])

    @property
    def field(self):
        return self.header["field"]

    def axis_coords(self, axis):
        lo, hi = (float(v) for v in self.header[f"bounds{axis}"].split())
        n = self.shape[axis]
        bc = self.header["grid_bc"].split()[axis]
        step = (hi - lo) / (n if bc == "periodic" else n - 1)
        return lo + step * np.arange(n)


def read_snapshot(path) -> Snapshot:
    header, payload = read_blob(path, SNAP_MAGIC)
    count = int(header["count"])
    enc = header["encoding"]
    if enc == "raw64":
        values = np.frombuffer(payload, dtype="<f8", count=count).astype(np.float64)
    elif enc == "csv":
        values = np.array([float(s) for s in payload.decode("utf-8").split("\n") if s])
    else:
        raise SnapFormatError(f"{path}: unknown encoding {enc!r}")
    if values.size != count:
        raise SnapFormatError(f"{path}: expected {count} values, got {values.size}")
    return Snapshot(header, values, payload)


def read_series(paths) -> list[Snapshot]:
    """Snapshots sorted by time; headers must agree on grid and field."""
    snaps = sorted((read_snapshot(p) for p in paths), key=lambda s: s.time)
    if not snaps:
        raise SnapFormatError("no input snapshots")
    first = snaps[0].header
    for s in snaps[1:]:
        for key in ("field", "system", "chart_kind", "grid_n", "grid_bc"):
            if s.header.get(key) != first.get(key):
                raise SnapFormatError(
                    f"inconsistent {key!r} across the snapshot series")
    return snaps


def read_report(path):
    header, payload = read_blob(path, REPORT_MAGIC)
    records = []
    for line in payload.decode("utf-8").splitlines():
        if not line.strip():
            continue
        rec = dict(kv.split("=", 1) for kv in line.split())
        rec["time"] = float(rec["time"])
        rec["value"] = float(rec["value"])
        records.append(rec)
    return header, records


def read_loss_log(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    epochs, losses = [], []
    for line in lines[1:]:
        e, v = line.split(",")
        epochs.append(int(e))
        losses.append(float(v))
    return np.array(epochs), np.array(losses)


def sphere_embedding(snap: Snapshot):
    """Ambient (x, y, z) mesh for a sphere-chart snapshot, recomputed from the
    chart parameters in the header."""
    kind = snap.header["chart_kind"]
    radius = float(snap.header["chart_radius"])
    a0 = snap.axis_coords(0)
    a1 = snap.axis_coords(1)
    if kind == "sphere_geographic":
        theta = a0
    elif kind == "sphere_stereographic":
        theta = 2.0 * np.arctan(a0 / radius)
    else:
        raise SnapFormatError(f"not a sphere chart: {kind!r}")
    tt, pp = np.meshgrid(theta, a1, indexing="ij")
    x = radius * np.sin(tt) * np.sin(pp)
    y = radius * np.sin(tt) * np.cos(pp)
    z = radius * np.cos(tt)
    return x, y, z
