"""CSV readers and writers. Every file is written to a temp name and renamed."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import AT_LEAST_CAP, FieldState, Grid1D, PropagationSequences
from .sequences import SweepTable

LADDER_HEADER = ["n", "s_star", "c", "s_dagger", "repro"]
SWEEP_HEADER = ["s0_star", "n", "fraction"]
INVARIANT_HEADER = ["t", "mass", "mass_drift", "max_clamp", "s0_identity_residual",
                    "sandwich_violation"]
SPEED_HEADER = ["opinion", "speed", "stderr", "c_theory", "rel_err"]
PLATEAU_HEADER = ["opinion", "region_lo", "region_hi", "mean", "target", "rel_err"]
INDEX_HEADER = ["index", "t", "file"]


def fmt(value) -> str:
    """Shortest representation that parses back to the same float."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def read_rows(path, header: Sequence[str] | None = None) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if header is not None and reader.fieldnames != list(header):
            raise ValueError(f"{path}: expected header {','.join(header)}, "
                             f"got {','.join(reader.fieldnames or [])}")
        return list(reader)


def _opt_float(text: str) -> float | None:
    return float(text) if text != "" else None


# -- ladder ---------------------------------------------------------------

def ladder_rows(seq: PropagationSequences) -> list[tuple]:
    rows = []
    for n, s_star in enumerate(seq.plateaus):
        c = math.inf if n == 0 else seq.speeds[n - 1]
        repro = seq.repro[n] if n < len(seq.repro) else None
        rows.append((n, s_star, c, seq.daggers[n], repro))
    return rows


def write_ladder(path, seq: PropagationSequences) -> None:
    write_rows(path, LADDER_HEADER, ladder_rows(seq))


def read_ladder(path) -> PropagationSequences:
    """Inverse of ``write_ladder``; N* is recovered from the last ``repro`` cell."""
    rows = read_rows(path, LADDER_HEADER)
    plateaus = tuple(float(r["s_star"]) for r in rows)
    speeds = tuple(float(r["c"]) for r in rows[1:])
    daggers = tuple(float(r["s_dagger"]) for r in rows)
    repro = tuple(float(r["repro"]) for r in rows if r["repro"] != "")
    last = _opt_float(rows[-1]["repro"])
    n_star = len(rows) - 1 if last is not None and last <= 1 else AT_LEAST_CAP
    return PropagationSequences(plateaus, speeds, daggers, repro, n_star)


# -- sweep ----------------------------------------------------------------

def write_sweep(path, table: SweepTable) -> None:
    write_rows(path, SWEEP_HEADER, table.rows)


def read_sweep(path) -> list[tuple[float, int, float]]:
    return [(float(r["s0_star"]), int(r["n"]), float(r["fraction"]))
            for r in read_rows(path, SWEEP_HEADER)]


# -- snapshots ------------------------------------------------------------

def snapshot_header(n_sim: int) -> list[str]:
    cols = ["x", "s0"]
    for n in range(1, n_sim + 1):
        cols += [f"i{n}", f"s{n}"]
    cols += [f"r{n}" for n in range(1, n_sim + 1)]
    return cols


def write_snapshot(path, state: FieldState, grid: Grid1D) -> None:
    cols = [grid.x, state.s0]
    for k in range(state.n_sim):
        cols += [state.i[k], state.s[k]]
    cols += list(state.r)
    data = np.column_stack(cols)
    lines = [",".join(snapshot_header(state.n_sim))]
    lines += [",".join(map(repr, row)) for row in data.tolist()]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_snapshot(path, t: float = 0.0) -> tuple[np.ndarray, FieldState]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n_sim = (len(header) - 2) // 3
    if header != snapshot_header(n_sim):
        raise ValueError(f"{path}: unexpected snapshot header")
    col = {name: data[:, j] for j, name in enumerate(header)}
    i = np.stack([col[f"i{n}"] for n in range(1, n_sim + 1)])
    s = np.stack([col[f"s{n}"] for n in range(1, n_sim + 1)])
    r = np.stack([col[f"r{n}"] for n in range(1, n_sim + 1)])
    return col["x"], FieldState(t, col["s0"], i, s, r)


def write_snapshot_set(out_dir, snapshots: Sequence[FieldState], grid: Grid1D) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    index_rows = []
    for k, snap in enumerate(snapshots):
        name = f"snapshot_{k:04d}.csv"
        write_snapshot(out_dir / name, snap, grid)
        paths.append(out_dir / name)
        index_rows.append((k, snap.t, name))
    write_rows(out_dir / "snapshots.csv", INDEX_HEADER, index_rows)
    return paths


def read_snapshot_set(out_dir) -> tuple[Grid1D, list[FieldState]]:
    """Load every snapshot listed in ``snapshots.csv``; the grid is rebuilt from x."""
    out_dir = Path(out_dir)
    snaps = []
    x = None
    for row in read_rows(out_dir / "snapshots.csv", INDEX_HEADER):
        x, state = read_snapshot(out_dir / row["file"], float(row["t"]))
        snaps.append(state)
    if x is None:
        raise ValueError(f"{out_dir}: no snapshots listed")
    grid = Grid1D(float(-x[0]), len(x))
    return grid, snaps


def write_invariants(path, records: Sequence[dict]) -> None:
    write_rows(path, INVARIANT_HEADER, ([rec[k] for k in INVARIANT_HEADER] for rec in records))
