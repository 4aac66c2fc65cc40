"""Shared CSV/JSON readers for the figure scripts.

The scripts consume only the CLI's documented file formats: CSV with
``#``-prefixed metadata lines (the first carrying the schema version) and the
JSON summary sidecars.  Nothing here imports the estimation package.
"""

import json
from pathlib import Path

SCHEMA = "lpblocks.v1"


class SchemaError(RuntimeError):
    pass


def read_csv(path, expected_kind):
    """Parse a results CSV into (metadata lines, list of row dicts)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise SchemaError(f"{path}: missing schema line; expected schema {SCHEMA}")
    head = lines[0][2:].split()
    fields = dict(part.split("=", 1) for part in head if "=" in part)
    if fields.get("schema") != SCHEMA:
        raise SchemaError(f"{path}: schema {fields.get('schema')!r}, expected {SCHEMA}")
    if fields.get("kind") != expected_kind:
        raise SchemaError(f"{path}: kind {fields.get('kind')!r}, expected {expected_kind!r}")
    meta = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if l and not l.startswith("#")]
    header = body[0].split(",")
    rows = [dict(zip(header, l.split(","))) for l in body[1:]]
    return meta, rows


def read_summary(path, expected_kind):
    payload = json.loads(Path(path).read_text())
    if payload.get("schema") != SCHEMA:
        raise SchemaError(f"{path}: schema {payload.get('schema')!r}, expected {SCHEMA}")
    if payload.get("kind") != expected_kind:
        raise SchemaError(f"{path}: kind {payload.get('kind')!r}, expected {expected_kind!r}")
    return payload


def write_sidecar(out_path, payload):
    """Numeric sidecar of the plotted arrays; this is the bit-stable artifact."""
    sidecar = Path(str(out_path) + ".sidecar.json")
    sidecar.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return sidecar
