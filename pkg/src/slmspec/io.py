"""CSV/JSON emission and schema validation.

CSV numbers use Python's shortest round-trip ``repr``, ``.`` as decimal
separator and LF line endings, so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

SUMMARY_SCHEMA_TAG = "slmspec.run-summary/1"
CONFIG_SCHEMA = "run_config.schema.json"
SUMMARY_SCHEMA = "run_summary.schema.json"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("slmspec").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    pairs = []
    for name in (CONFIG_SCHEMA, SUMMARY_SCHEMA):
        schema = load_schema(name)
        pairs.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(pairs)


def validator(name: str):
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=_registry())


def validate(document: dict, name: str):
    """Raise :class:`jsonschema.ValidationError` if ``document`` does not conform."""
    validator(name).validate(document)


def format_number(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def csv_bytes(header, columns) -> bytes:
    columns = [np.asarray(c, dtype=float) for c in columns]
    if len({len(c) for c in columns}) != 1:
        raise ValueError("columns differ in length")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format_number(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def write_csv(path, header, columns):
    Path(path).write_bytes(csv_bytes(header, columns))


def read_csv(path):
    """Header list and float columns of a file written by :func:`write_csv`."""
    text = Path(path).read_text(encoding="ascii").splitlines()
    header = text[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in text[1:]]
    return header, np.array(rows).T


def jsonable(value):
    """Plain-JSON copy with non-finite floats replaced by ``None``."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def json_bytes(document: dict) -> bytes:
    return (json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")
