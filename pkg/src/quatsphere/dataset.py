"""Text envelope shared by every file the package writes.

A file is one line of JSON metadata followed by a CSV table whose first row
names the columns.  Header keys are written in a fixed order (``format``
first, ``created`` last) so that two runs differing only in their timestamp
produce files that differ only on that field.  Floats are written with
``repr``, the shortest decimal that round-trips, so reading a file back gives
bit-identical values.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .params import EnsembleParams
from .sampler import EigenSample

SAMPLE_FORMAT = "quatsphere.eigensample/1"
SAMPLE_COLUMNS = ("realization_index", "re", "im")
TIMESTAMP_KEY = "created"


class EnvelopeError(ValueError):
    """The file is not a well-formed envelope of the expected kind."""


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def dumps_envelope(meta: dict, columns, rows, created: str | None = None) -> str:
    header = {k: v for k, v in meta.items() if k != TIMESTAMP_KEY}
    header[TIMESTAMP_KEY] = created if created is not None else _timestamp()
    buf = io.StringIO()
    buf.write(json.dumps(header, separators=(", ", ": ")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_envelope(path, meta: dict, columns, rows, created: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_envelope(meta, columns, rows, created))
    return path


def loads_envelope(text: str):
    """Return ``(meta, columns, rows)`` with rows as lists of strings."""
    first, _, body = text.partition("\n")
    try:
        meta = json.loads(first)
    except json.JSONDecodeError as exc:
        raise EnvelopeError(f"metadata line is not JSON: {exc}") from None
    if not isinstance(meta, dict):
        raise EnvelopeError("metadata line must be a JSON object")
    reader = csv.reader(io.StringIO(body))
    try:
        columns = next(reader)
    except StopIteration:
        raise EnvelopeError("missing CSV column header") from None
    rows = [r for r in reader if r]
    return meta, columns, rows


def read_envelope(path):
    return loads_envelope(Path(path).read_text())


def payload_digest(text: str) -> str:
    """SHA-256 of an envelope with the timestamp field removed."""
    first, _, body = text.partition("\n")
    meta = json.loads(first)
    meta.pop(TIMESTAMP_KEY, None)
    canon = json.dumps(meta, separators=(", ", ": ")) + "\n" + body
    return hashlib.sha256(canon.encode()).hexdigest()


def file_digest(path) -> str:
    return payload_digest(Path(path).read_text())


# -- eigenvalue samples ------------------------------------------------------

def sample_metadata(sample: EigenSample) -> dict:
    return {
        "format": SAMPLE_FORMAT,
        "params": sample.params.as_dict(),
        "seed": sample.seed,
        "realizations": sample.realizations,
        "generator_version": sample.generator_version,
        **sample.extra,
    }


def _sample_rows(sample: EigenSample):
    for i, row in enumerate(sample.eigenvalues):
        for z in row:
            yield i, z.real, z.imag


def dumps_sample(sample: EigenSample, created: str | None = None) -> str:
    return dumps_envelope(sample_metadata(sample), SAMPLE_COLUMNS, _sample_rows(sample), created)


def save_sample(sample: EigenSample, path, created: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_sample(sample, created))
    return path


def loads_sample(text: str) -> EigenSample:
    meta, columns, rows = loads_envelope(text)
    if meta.get("format") != SAMPLE_FORMAT:
        raise EnvelopeError(f"not an eigenvalue sample (format={meta.get('format')!r})")
    if tuple(columns) != SAMPLE_COLUMNS:
        raise EnvelopeError(f"unexpected columns {columns}")
    params = EnsembleParams(**meta["params"])
    R = int(meta["realizations"])
    if len(rows) != R * params.N:
        raise EnvelopeError(f"expected {R * params.N} rows, found {len(rows)}")
    idx = np.fromiter((int(r[0]) for r in rows), dtype=np.int64, count=len(rows))
    if not np.array_equal(idx, np.repeat(np.arange(R), params.N)):
        raise EnvelopeError("realization indices are not contiguous and ordered")
    re = np.fromiter((float(r[1]) for r in rows), dtype=float, count=len(rows))
    im = np.fromiter((float(r[2]) for r in rows), dtype=float, count=len(rows))
    known = {"format", "params", "seed", "realizations", "generator_version", TIMESTAMP_KEY}
    extra = {k: v for k, v in meta.items() if k not in known}
    return EigenSample(params, int(meta["seed"]), (re + 1j * im).reshape(R, params.N),
                       generator_version=meta["generator_version"], extra=extra)


def load_sample(path) -> EigenSample:
    return loads_sample(Path(path).read_text())


def read_table(path):
    """Read any envelope into ``(meta, {column: array})``; non-numeric columns stay strings."""
    meta, columns, rows = read_envelope(path)
    table = {}
    for i, c in enumerate(columns):
        col = [r[i] for r in rows]
        try:
            table[c] = np.array(col, dtype=float)
        except ValueError:
            table[c] = np.array(col, dtype=object)
    return meta, table
