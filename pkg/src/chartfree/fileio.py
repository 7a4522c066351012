"""On-disk formats: field snapshots, training datasets, model checkpoints,
and comparison reports.

Every file is a UTF-8 text header terminated by a line containing only
`---`, followed by a data block.  Header lines are `key: value`; floats are
written with repr so they round-trip bit for bit.  Data blocks are either
little-endian float64 (`encoding: raw64`, flat row-major) or one repr per
line (`encoding: csv`).  Snapshot files hold one field at one time.

Checkpoint parameter order: weights layer by layer (row-major, fan_in x
fan_out), then biases, then the Adam first moments in the same weight/bias
order, then the second moments.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .engine import MseRecord, Trajectory
from .geometry import Chart
from .grid import GridSpec, ScalarField
from .learn import Dataset, Mlp

SNAP_MAGIC = "CFSNAP 1"
DATA_MAGIC = "CFDATA 1"
CKPT_MAGIC = "CFMLP 1"
REPORT_MAGIC = "CFREPORT 1"


class FileFormatError(ValueError):
    pass


def _write(path, header: list[tuple[str, str]], magic: str, payload: bytes):
    text = magic + "\n" + "".join(f"{k}: {v}\n" for k, v in header) + "---\n"
    with open(path, "wb") as fh:
        fh.write(text.encode("utf-8"))
        fh.write(payload)


def _read(path, magic: str):
    with open(path, "rb") as fh:
        blob = fh.read()
    sep = b"\n---\n"
    cut = blob.find(sep)
    if cut < 0:
        raise FileFormatError(f"{path}: missing header terminator")
    lines = blob[:cut].decode("utf-8").split("\n")
    if lines[0] != magic:
        raise FileFormatError(f"{path}: expected magic {magic!r}, got {lines[0]!r}")
    header = {}
    for line in lines[1:]:
        key, _, value = line.partition(": ")
        header[key] = value
    return header, blob[cut + len(sep):]


def _encode_block(values: np.ndarray, encoding: str) -> bytes:
    flat = np.asarray(values, dtype=np.float64).reshape(-1)
    if encoding == "raw64":
        return flat.astype("<f8").tobytes()
    if encoding == "csv":
        return ("".join(repr(float(v)) + "\n" for v in flat)).encode("utf-8")
    raise FileFormatError(f"unknown encoding {encoding!r}")


def _decode_block(payload: bytes, encoding: str, count: int) -> np.ndarray:
    if encoding == "raw64":
        arr = np.frombuffer(payload, dtype="<f8", count=count)
        return arr.astype(np.float64)
    if encoding == "csv":
        vals = [float(s) for s in payload.decode("utf-8").split("\n") if s]
        return np.array(vals, dtype=np.float64)
    raise FileFormatError(f"unknown encoding {encoding!r}")


def _grid_header(grid: GridSpec) -> list[tuple[str, str]]:
    chart = grid.chart
    out = [("chart_kind", chart.kind)]
    if chart.lam is not None:
        out.append(("chart_lambda", repr(chart.lam)))
    if chart.radius is not None:
        out.append(("chart_radius", repr(chart.radius)))
    for ax, (lo, hi) in enumerate(chart.bounds):
        out.append((f"bounds{ax}", f"{lo!r} {hi!r}"))
    out.append(("grid_n", " ".join(str(v) for v in grid.n)))
    out.append(("grid_spacing", " ".join(repr(v) for v in grid.spacing)))
    out.append(("grid_bc", " ".join(grid.bc)))
    return out


def grid_from_header(header: dict[str, str]) -> GridSpec:
    kind = header["chart_kind"]
    lam = float(header["chart_lambda"]) if "chart_lambda" in header else None
    radius = float(header["chart_radius"]) if "chart_radius" in header else None
    bounds = []
    ax = 0
    while f"bounds{ax}" in header:
        lo, hi = header[f"bounds{ax}"].split()
        bounds.append((float(lo), float(hi)))
        ax += 1
    chart = Chart(kind, tuple(bounds), lam=lam, radius=radius)
    n = tuple(int(v) for v in header["grid_n"].split())
    spacing = tuple(float(v) for v in header["grid_spacing"].split())
    bc = tuple(header["grid_bc"].split())
    return GridSpec(chart, n, spacing, bc)


def write_snapshot(path, field: ScalarField, *, system: str, field_name: str,
                   field_index: int, time: float, source: str,
                   config_hash: str, seed: int, norm: float = 1.0,
                   encoding: str = "raw64"):
    header = [
        ("system", system),
        ("field", field_name),
        ("field_index", str(field_index)),
        ("time", repr(float(time))),
        ("source", source),
        ("normalization", repr(float(norm))),
    ]
    header += _grid_header(field.grid)
    header += [
        ("config_hash", config_hash),
        ("seed", str(seed)),
        ("encoding", encoding),
        ("count", str(field.values.size)),
    ]
    _write(path, header, SNAP_MAGIC, _encode_block(field.values, encoding))


def read_snapshot(path):
    """Returns (header dict, ScalarField)."""
    header, payload = _read(path, SNAP_MAGIC)
    grid = grid_from_header(header)
    values = _decode_block(payload, header["encoding"], int(header["count"]))
    if values.size != grid.npoints:
        raise FileFormatError(f"{path}: value count does not match grid")
    return header, ScalarField(grid, values)


def save_trajectory(traj: Trajectory, outdir, prefix: str, *, field_names,
                    config_hash: str, seed: int, norms=(1.0, 1.0),
                    encoding: str = "raw64"):
    """One snapshot file per field per recorded time:
    {prefix}_{field}_{index:06d}.snap"""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for k, t in enumerate(traj.times):
        for f in range(2):
            path = os.path.join(outdir, f"{prefix}_{field_names[f]}_{k:06d}.snap")
            write_snapshot(
                path, ScalarField(traj.grid, traj.states[k, f]),
                system=traj.system, field_name=field_names[f], field_index=f,
                time=float(t), source=traj.source, config_hash=config_hash,
                seed=seed, norm=float(norms[f]), encoding=encoding,
            )
            paths.append(path)
    return paths


def load_trajectory(outdir, prefix: str) -> Trajectory:
    names = sorted(f for f in os.listdir(outdir)
                   if f.startswith(prefix + "_") and f.endswith(".snap"))
    if not names:
        raise FileFormatError(f"no snapshots matching {prefix}_* in {outdir}")
    by_index: dict[int, dict[int, tuple[float, np.ndarray]]] = {}
    grid = None
    system = ""
    source = ""
    for name in names:
        header, field = read_snapshot(os.path.join(outdir, name))
        k = int(name[:-5].rsplit("_", 1)[1])
        fi = int(header["field_index"])
        if grid is None:
            grid, system, source = field.grid, header["system"], header["source"]
        elif field.grid != grid:
            raise FileFormatError(f"{name}: grid differs from the rest of the set")
        by_index.setdefault(k, {})[fi] = (float(header["time"]), field.values)
    ks = sorted(by_index)
    times, states = [], []
    for k in ks:
        pair = by_index[k]
        if set(pair) != {0, 1}:
            raise FileFormatError(f"snapshot index {k} is missing a field")
        if pair[0][0] != pair[1][0]:
            raise FileFormatError(f"snapshot index {k} has inconsistent times")
        times.append(pair[0][0])
        states.append(np.stack([pair[0][1], pair[1][1]]))
    return Trajectory(grid, np.array(times), np.stack(states), source, system)


def write_dataset(path, dataset: Dataset, *, column_names, encoding: str = "raw64"):
    rows = np.concatenate([dataset.features, dataset.targets], axis=1)
    header = list(dataset.provenance.items())
    header += [
        ("columns", " ".join(column_names)),
        ("rows", str(len(dataset))),
        ("encoding", encoding),
    ]
    _write(path, header, DATA_MAGIC, _encode_block(rows, encoding))


def read_dataset(path) -> Dataset:
    header, payload = _read(path, DATA_MAGIC)
    ncols = len(header["columns"].split())
    rows = int(header["rows"])
    flat = _decode_block(payload, header["encoding"], rows * ncols)
    table = flat.reshape(rows, ncols)
    nfeat = ncols - 2
    prov = {k: v for k, v in header.items()
            if k not in ("columns", "rows", "encoding")}
    return Dataset(table[:, :nfeat], table[:, nfeat:], prov)


def write_checkpoint(path, mlp: Mlp, *, system: str, seed: int,
                     normalization=(1.0, 1.0), config_hash: str = ""):
    params = (mlp.weights + mlp.biases + mlp.m_w + mlp.m_b + mlp.v_w + mlp.v_b)
    payload = b"".join(np.asarray(p, dtype="<f8").reshape(-1).tobytes() for p in params)
    header = [
        ("layer_widths", " ".join(str(w) for w in mlp.widths)),
        ("activation", "tanh"),
        ("system", system),
        ("seed", str(seed)),
        ("normalization", " ".join(repr(float(v)) for v in normalization)),
        ("config_hash", config_hash),
        ("adam_step", str(mlp.step)),
    ]
    _write(path, header, CKPT_MAGIC, payload)


def read_checkpoint(path):
    """Returns (header dict, Mlp)."""
    header, payload = _read(path, CKPT_MAGIC)
    if header["activation"] != "tanh":
        raise FileFormatError(f"unsupported activation {header['activation']!r}")
    widths = tuple(int(v) for v in header["layer_widths"].split())
    shapes_w = [(lo, hi) for lo, hi in zip(widths[:-1], widths[1:])]
    shapes_b = [(hi,) for hi in widths[1:]]
    arrays = []
    offset = 0
    for shape in shapes_w + shapes_b + shapes_w + shapes_b + shapes_w + shapes_b:
        size = int(np.prod(shape))
        arrays.append(np.frombuffer(payload, dtype="<f8", count=size,
                                    offset=offset).astype(np.float64).reshape(shape))
        offset += size * 8
    nl = len(shapes_w)
    mlp = Mlp(widths,
              weights=arrays[0:nl], biases=arrays[nl:2 * nl],
              m_w=arrays[2 * nl:3 * nl], m_b=arrays[3 * nl:4 * nl],
              v_w=arrays[4 * nl:5 * nl], v_b=arrays[5 * nl:6 * nl],
              step=int(header["adam_step"]))
    return header, mlp


def write_report(path, records: list[MseRecord], *, config_hash: str, seed: int,
                 system: str):
    lines = []
    for r in records:
        lines.append(f"field={r.field} time={r.time!r} metric=mse value={r.mse!r}\n")
        lines.append(
            f"field={r.field} time={r.time!r} metric=max_abs_dev value={r.max_abs_dev!r}\n"
        )
    header = [("system", system), ("config_hash", config_hash), ("seed", str(seed))]
    _write(path, header, REPORT_MAGIC, "".join(lines).encode("utf-8"))


def read_report(path):
    """Returns (header dict, list of record dicts)."""
    header, payload = _read(path, REPORT_MAGIC)
    records = []
    for line in payload.decode("utf-8").splitlines():
        if not line.strip():
            continue
        rec = dict(kv.split("=", 1) for kv in line.split())
        rec["time"] = float(rec["time"])
        rec["value"] = float(rec["value"])
        records.append(rec)
    return header, records


def write_loss_log(path, losses):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,loss\n")
        for i, v in enumerate(losses):
            fh.write(f"{i},{float(v)!r}\n")


def read_loss_log(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    return np.array([float(line.split(",")[1]) for line in lines[1:]])
