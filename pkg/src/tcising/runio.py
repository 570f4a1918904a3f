"""Deterministic writers: long-format CSV, snapshot text files, JSON metadata.

All floats are rendered with %.12g so identical runs produce byte-identical
files regardless of platform dict ordering or worker count.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .states import bits_to_string


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "nan"
        return f"{float(x):.12g}"
    return str(x)


def write_timeseries(path, rows, with_stderr: bool = False) -> None:
    """rows: iterable of (t, label, index, value[, stderr])."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write("t,label,index,value" + (",stderr" if with_stderr else "") + "\n")
        for row in rows:
            f.write(",".join(fmt(x) for x in row) + "\n")


def read_timeseries(path):
    """Inverse of write_timeseries; returns list of dicts."""
    out = []
    with open(path) as f:
        header = f.readline().strip().split(",")
        for line in f:
            parts = line.rstrip("\n").split(",")
            rec = dict(zip(header, parts))
            rec["t"] = float(rec["t"])
            rec["value"] = float(rec["value"])
            if "stderr" in rec and rec["stderr"] != "":
                rec["stderr"] = float(rec["stderr"])
            out.append(rec)
    return out


def write_scan_csv(path, rows) -> None:
    """rows: iterable of (h_z, G, g, q_star, energy, n_ph)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write("h_z,G,g,q_star,energy,n_ph\n")
        for row in rows:
            f.write(",".join(fmt(x) for x in row) + "\n")


def write_snapshots(path, snapshots: dict, N: int) -> None:
    """One '0'/'1' configuration per line under a '# t=...' header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for t in sorted(snapshots):
            f.write(f"# t={fmt(float(t))}\n")
            for bits in snapshots[t]:
                f.write(bits_to_string(bits, N) + "\n")


def read_snapshots(path) -> dict:
    snaps: dict[float, list[int]] = {}
    current = None
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# t="):
                current = float(line[4:])
                snaps[current] = []
            else:
                word = sum(1 << j for j, c in enumerate(line) if c == "1")
                snaps[current].append(word)
    return snaps


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_meta(path, meta: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_jsonable(meta), f, indent=2, sort_keys=True)
        f.write("\n")
