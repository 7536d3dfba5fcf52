"""CSV export with a JSON provenance sidecar."""
import csv
import datetime
import json
from collections import Counter
from pathlib import Path

from .. import __version__
from .._backend import active_backend
from ..montecarlo import PRNG_ALGORITHM

CSV_COLUMNS = (
    "t_s", "selector", "phi_rad", "delta_rads", "n1", "n2", "N", "alpha",
    "V0", "V1", "F", "C", "Perr", "Q_pct",
)


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def emit_csv(result, path, seed=None):
    """Write ``result`` to ``path`` and its metadata to ``<stem>.meta.json``.

    Floats use 17 significant digits so values round-trip exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])

    cfg = result.config
    flags = Counter(f for row in result.rows for f in row.flags)
    meta = {
        "config_sha256": cfg.digest() if cfg is not None else None,
        "scenario": cfg.name if cfg is not None else None,
        "prng": PRNG_ALGORITHM,
        "seed": seed if seed is not None else (cfg.seed if cfg is not None else None),
        "version": __version__,
        "backend": active_backend(),
        "rows": len(result.rows),
        "flags": dict(flags),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": cfg.to_dict() if cfg is not None else None,
    }
    meta.update(result.metadata)
    with open(sidecar_path(path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
    return path


def read_csv(path):
    """Load a CSV written by :func:`emit_csv` as a list of dicts of floats/strings."""
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append({k: (v if k == "selector" else float(v)) for k, v in rec.items()})
    return out
