"""CSV ingestion and JSON report serialization."""

import csv
from dataclasses import asdict, dataclass, field
import io
import json
import math

import numpy as np

from .exceptions import ValidationError

SCHEMA_VERSION = 1


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv_matrix(path):
    """Read one numeric row per line. A non-numeric first line is taken as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValidationError(f"{path}: no numeric rows")
    width = len(rows[0])
    data = []
    for lineno, row in enumerate(rows, 1):
        if len(row) != width:
            raise ValidationError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise ValidationError(f"{path}: row {lineno}: {exc}") from exc
    X = np.array(data, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValidationError(f"{path}: non-finite values")
    return X


def format_csv_matrix(X, header=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in np.asarray(X):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def write_csv_matrix(path, X, header=None):
    with open(path, "w", newline="") as fh:
        fh.write(format_csv_matrix(X, header))


def _check_finite(obj, where="report"):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValidationError(f"non-finite value in {where}")
    elif isinstance(obj, dict):
        for key, value in obj.items():
            _check_finite(value, f"{where}.{key}")
    elif isinstance(obj, (list, tuple)):
        for value in obj:
            _check_finite(value, where)


def dumps(obj):
    _check_finite(obj)
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


@dataclass
class RunReport:
    """Everything a ``reduce`` run produced, minus the reduced coordinates themselves."""

    version: str
    config: dict
    p: float
    k: int
    m: int
    n: int
    sigma: list
    weights: list
    normalization_scale: float
    distortion: dict
    certified_factor: float
    kappa: float
    snowflake: dict
    subspace_dims: list
    degenerate: bool
    timings: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self, timings=True):
        out = asdict(self)
        if not timings:
            out.pop("timings")
        return out

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(**data)

    def to_json(self, timings=True):
        return dumps(self.to_dict(timings=timings))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
