"""Run-directory persistence: atomic writes, manifests, CSV schemas.

Every CLI invocation gets a fresh timestamped directory holding a
config snapshot (config.json, timestamp-free so reruns byte-match), a
manifest.json with provenance, and the experiment's CSV/JSON outputs.
All numeric CSV cells are written with 17 significant digits so values
round-trip exactly.
"""
from __future__ import annotations

import datetime as _dt
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__

__all__ = [
    "create_run_dir",
    "write_json",
    "write_manifest",
    "write_rows_csv",
    "trajectory_to_csv",
    "diagnostics_to_csv",
    "fmt",
]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def create_run_dir(output_dir: str, subcommand: str) -> Path:
    base = Path(output_dir)
    base.mkdir(parents=True, exist_ok=True)
    stamp = _dt.datetime.now().strftime("%Y%m%dT%H%M%S")
    for suffix in range(1000):
        name = f"{subcommand}-{stamp}" + (f"-{suffix}" if suffix else "")
        path = base / name
        try:
            path.mkdir()
            return path
        except FileExistsError:
            continue
    raise RuntimeError("could not allocate a unique run directory")


def _atomic_write(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    """Recursively convert numpy scalars and drop non-finite floats to None.

    Bare NaN/Infinity tokens are not valid JSON and break downstream
    consumers, so they are mapped to null.
    """
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    _atomic_write(
        path,
        json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n",
    )


def write_manifest(run_dir: Path, subcommand: str, extra: dict | None = None) -> None:
    manifest = {
        "artifact": "zakbench",
        "version": __version__,
        "subcommand": subcommand,
        "created": _dt.datetime.now().isoformat(),
    }
    if extra:
        manifest.update(extra)
    write_json(run_dir / "manifest.json", manifest)


def write_rows_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def trajectory_to_csv(path: Path, traj) -> None:
    """Per sample and mode: t, k, re_u, im_u, re_np, im_np."""
    ks = np.arange(-traj.radius, traj.radius + 1)
    rows = []
    for i, t in enumerate(traj.times):
        for j, k in enumerate(ks):
            u = traj.u[i, j]
            n = traj.n_plus[i, j]
            rows.append((t, int(k), u.real, u.imag, n.real, n.imag))
    write_rows_csv(path, ["t", "k", "re_u", "im_u", "re_np", "im_np"], rows)


def diagnostics_to_csv(path: Path, norms: dict) -> None:
    """Per sample: t, mass, energy, then the configured H^s norm columns."""
    keys = ["t", "mass", "energy"] + [
        k for k in norms if k not in ("t", "mass", "energy")
    ]
    rows = zip(*(np.asarray(norms[k]) for k in keys))
    write_rows_csv(path, keys, rows)
