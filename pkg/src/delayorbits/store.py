"""JSON and CSV persistence for seed orbits and branches.

Documents are written with sorted keys and a SHA-256 checksum over the
canonical encoding of everything except ``checksum`` and ``timestamp``,
so identical runs give byte-identical files up to the timestamp line.
Non-finite floats are stored as ``null``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from datetime import datetime, timezone

import numpy as np

from .continuation import BranchPoint, OrbitBranch
from .errors import DelayOrbitError
from .fourier import PeriodicMap

__all__ = [
    "SEED_SCHEMA",
    "BRANCH_SCHEMA",
    "CSV_COLUMNS",
    "ChecksumMismatch",
    "SchemaError",
    "seed_document",
    "branch_document",
    "write_document",
    "read_document",
    "branch_from_document",
    "write_branch_csv",
]

SEED_SCHEMA = "delay-orbit/seed/v1"
BRANCH_SCHEMA = "delay-orbit/branch/v1"
CSV_COLUMNS = ("tau", "norm0", "norm1", "min_multiplier_dist", "newton_iters",
               "periodicity_residual")
_VOLATILE = ("checksum", "timestamp")


class ChecksumMismatch(DelayOrbitError):
    pass


class SchemaError(DelayOrbitError, ValueError):
    pass


def _clean(obj):
    """Convert numpy scalars/arrays to JSON types; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _canonical(doc):
    body = {k: v for k, v in doc.items() if k not in _VOLATILE}
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)


def checksum(doc):
    return hashlib.sha256(_canonical(doc).encode()).hexdigest()


def _finish(doc):
    doc = _clean(doc)
    doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc["checksum"] = checksum(doc)
    return doc


def seed_document(config, digest, x, report, kernel=None):
    """Seed record: the orbit at ``tau = 0`` and its Floquet certificate."""
    return _finish({
        "schema": SEED_SCHEMA,
        "problem": config.problem_dict(),
        "config": config.to_text(),
        "problem_digest": digest,
        "K": x.K,
        "tau": 0.0,
        "x": x.to_record(),
        "verdict": report.verdict.value,
        "certificate": {"floquet": report.as_dict(), "kernel": kernel},
    })


def _point_record(pt):
    return {
        "tau": pt.tau,
        "x": pt.x.to_record(),
        "tangent": None if pt.tangent_dx is None else pt.tangent_dx.to_record(),
        "certificate": pt.certificate,
    }


def branch_document(config, digest, branch):
    return _finish({
        "schema": BRANCH_SCHEMA,
        "problem": config.problem_dict(),
        "config": config.to_text(),
        "problem_digest": digest,
        "K": config.K,
        "points": [_point_record(pt) for pt in branch.points],
        "termination_reason": branch.termination_reason,
        "details": branch.details,
    })


def write_document(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1, allow_nan=False)
        fh.write("\n")


def read_document(path, schema=None, verify=True):
    """Load a seed or branch document, checking schema and checksum."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "schema" not in doc:
        raise SchemaError(f"{path} has no schema tag")
    if schema is not None and doc["schema"] != schema:
        raise SchemaError(f"{path} has schema {doc['schema']!r}, expected {schema!r}")
    if verify and doc.get("checksum") != checksum(doc):
        raise ChecksumMismatch(f"{path}: checksum does not match contents")
    return doc


def branch_from_document(doc):
    points = []
    for rec in doc["points"]:
        tan = rec.get("tangent")
        points.append(BranchPoint(
            float(rec["tau"]),
            PeriodicMap.from_record(rec["x"]),
            None if tan is None else PeriodicMap.from_record(tan),
            rec.get("certificate") or {},
        ))
    return OrbitBranch(points, doc["termination_reason"], doc.get("problem_digest", ""),
                       doc.get("details") or {})


def _g17(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    if isinstance(v, int):
        return str(v)
    return "%.17g" % v


def write_branch_csv(branch, path, seed_multiplier_dist=None, periodicity=None):
    """One row per branch point; columns as in ``CSV_COLUMNS``.

    ``min_multiplier_dist`` is only defined for the undelayed orbit and is
    left as ``nan`` elsewhere; ``periodicity`` maps point index to residual.
    """
    periodicity = periodicity or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i, pt in enumerate(branch.points):
            newton = pt.certificate.get("newton") or {}
            mdist = seed_multiplier_dist if pt.tau == 0.0 else None
            w.writerow([
                _g17(pt.tau),
                _g17(pt.x.sobolev_norm(0)),
                _g17(pt.x.sobolev_norm(1)),
                _g17(mdist),
                _g17(int(newton.get("iterations", 0))),
                _g17(periodicity.get(i)),
            ])
