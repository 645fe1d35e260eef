"""CSV/JSON serialization and run manifests.

Floats are written with 17 significant digits in CSV and with Python's
shortest round-trip repr in JSON, so every double survives a round trip
unchanged.  Data files never contain timestamps; those live only in
``manifest.json``.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import os
import platform
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from .profile_ode import ProfileParams, ProfileSolution, SolverConfig, TerminationReason

OUT_DIR_ENV = "REPLICATOR_SELFSIM_OUT"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, columns) -> Path:
    path = Path(path)
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Return ``(header, columns)`` with columns as float arrays."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    return header, [body[:, i] for i in range(len(header))]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not np.isfinite(v):
            return None if np.isnan(v) else ("inf" if v > 0 else "-inf")
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def write_profile(sol: ProfileSolution, csv_path, json_path, extra: dict | None = None,
                  header=("s", "q", "qp")):
    """Nodes to CSV and metadata (plus ``extra``) to JSON."""
    write_csv(csv_path, header, [sol.s, sol.q, sol.qp])
    rec = sol.record()
    if extra:
        rec.update(extra)
    write_json(json_path, rec)


def profile_from_record(record: dict, s, q, qp) -> ProfileSolution:
    cfg = dict(record["config"])
    return ProfileSolution(
        params=ProfileParams(**record["params"]),
        s=s, q=q, qp=qp,
        terminated_by=TerminationReason(record["terminated_by"]),
        tail_exponent=float(record["tail_exponent"]),
        config=SolverConfig(**cfg),
        steps=int(record.get("steps", 0)),
    )


def read_profile(csv_path, json_path, record_key: str | None = None) -> ProfileSolution:
    """Rebuild a :class:`ProfileSolution` written by :func:`write_profile`.

    ``record_key`` selects a nested profile record (e.g. ``"profile"`` in a
    calibration result).
    """
    record = read_json(json_path)
    if record_key:
        record = record[record_key]
    _, (s, q, qp) = read_csv(csv_path)
    return profile_from_record(record, s, q, qp)


def _version(dist: str) -> str:
    try:
        return metadata.version(dist)
    except metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(out_dir, command: str, inputs: dict, outputs, status: dict | None = None):
    """Describe a run: inputs, software versions, termination info and file hashes."""
    out_dir = Path(out_dir)
    files = {}
    for p in outputs:
        p = Path(p)
        files[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = {
        "command": command,
        "inputs": inputs,
        "status": status or {},
        "outputs": files,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": _version("scipy"),
            "package": _version("artifact"),
        },
        "argv": sys.argv,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    return write_json(out_dir / "manifest.json", manifest)


def resolve_out_dir(explicit, command: str) -> Path:
    """Explicit path, else ``$REPLICATOR_SELFSIM_OUT/<command>``, else ``./out/<command>``."""
    if explicit:
        d = Path(explicit)
    else:
        d = Path(os.environ.get(OUT_DIR_ENV, "out")) / command
    d.mkdir(parents=True, exist_ok=True)
    return d
