"""Deterministic artifact emission: JSON reports and CSV tables.

Artifacts embed their full configuration and are byte-identical across
reruns of the same config and seed.  Timing provenance is opt-in because it
would break byte-level reproducibility.
"""

import json
import time

from ._version import __version__

CSV_SCHEMA_VERSION = 1


def dump_json(payload, path=None, timing=None):
    """Serialize a report deterministically; optionally attach wall time."""
    if timing is not None:
        payload = dict(payload)
        payload["timing"] = {"timestamp": timing[0], "wall_time_s": timing[1]}
    text = json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def compact_json(payload):
    """Single-line serialization for CSV header comments."""
    return json.dumps(payload, separators=(",", ":"), allow_nan=False)


def _sanitize(value):
    if value is None:
        return "null"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header_comments, columns, rows):
    """CSV with '#'-prefixed metadata lines and full round-trip floats."""
    lines = [f"# mbl-otto csv v{CSV_SCHEMA_VERSION}"]
    lines += [f"# {line}" for line in header_comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_sanitize(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text


def summary_artifact(summary):
    """JSON payload for an ensemble summary."""
    return {
        "schema": "mbl-otto/summary-v1",
        "version": __version__,
        "metadata": summary.metadata,
        "points": summary.points,
    }


def records_rows(summary):
    """Per-realization CSV rows for a single-point run with kept records."""
    rows = []
    for point_records in summary.records:
        for rec in point_records:
            rows.append([rec.realization_id, rec.w1, rec.q2, rec.w3, rec.q4,
                         rec.w_tot])
    return rows


def now():
    return time.strftime("%Y-%m-%dT%H:%M:%S%z"), time.time()
