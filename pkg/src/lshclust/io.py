"""Dataset ingestion and artifact files.

Vector files use the common binary layout of one 4-byte little-endian
dimension prefix per record followed by the payload (float32 for .fvecs,
uint8 for .bvecs, chosen by extension).  Categorical CSV ingestion is
schema-driven via a sidecar declaring each column numeric or categorical.
Sparse text is one whitespace-separated index set per line.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .data import CategoricalData, DenseData, MixedData, SparseData
from .serialize import FormatError


def read_fvecs(path) -> DenseData:
    """Read .fvecs/.bvecs vectors; all records must share one dimension."""
    path = Path(path)
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size == 0:
        return DenseData(np.empty((0, 0)))
    if path.suffix == ".bvecs":
        return DenseData(_parse_prefixed(raw, np.dtype("<u1")))
    return DenseData(_parse_prefixed(raw, np.dtype("<f4")))


def _parse_prefixed(raw: np.ndarray, dtype: np.dtype) -> np.ndarray:
    if raw.size < 4:
        raise FormatError("truncated record at byte 0")
    d = int(raw[:4].view("<i4")[0])
    if d <= 0:
        raise FormatError("non-positive dimension at byte 0")
    record = 4 + d * dtype.itemsize
    if raw.size % record:
        offset = (raw.size // record) * record
        raise FormatError(f"truncated record at byte {offset}")
    n = raw.size // record
    table = raw.reshape(n, record)
    dims = table[:, :4].copy().view("<i4").ravel()
    if (dims != d).any():
        bad = int(np.flatnonzero(dims != d)[0])
        raise FormatError(f"inconsistent dimension at byte {bad * record}")
    body = table[:, 4:].copy().view(dtype)
    return body.astype(np.float64)


def write_fvecs(path, data: DenseData):
    path = Path(path)
    n, d = data.vectors.shape
    if path.suffix == ".bvecs":
        body = np.clip(np.rint(data.vectors), 0, 255).astype("<u1")
    else:
        body = data.vectors.astype("<f4")
    with open(path, "wb") as fh:
        for row in body:
            np.int32(d).astype("<i4").tofile(fh)
            row.tofile(fh)


def read_sparse(path, universe: int = 0) -> SparseData:
    """One object per line: whitespace-separated non-negative indices."""
    sets = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            tokens = line.split()
            if not tokens:
                raise FormatError(f"line {lineno}: empty index set")
            try:
                idx = np.array(sorted({int(t) for t in tokens}), dtype=np.int64)
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer index") from None
            if idx[0] < 0:
                raise FormatError(f"line {lineno}: negative index")
            sets.append(idx)
    return SparseData(sets, universe)


def write_sparse(path, data: SparseData):
    with open(path, "w") as fh:
        for s in data.sets:
            fh.write(" ".join(str(int(i)) for i in s) + "\n")


MISSING = ""


def read_categorical_csv(path, schema_path):
    """Schema-driven CSV: the sidecar lists columns in order with kind
    "numeric" or "categorical".  Categorical strings are dictionary-encoded
    in first-appearance order; the empty string maps to the reserved code
    after all seen values.  Returns (MixedData | CategoricalData, dicts).
    """
    schema = json.loads(Path(schema_path).read_text())
    columns = schema["columns"]
    kinds = [c["kind"] for c in columns]
    names = [c["name"] for c in columns]
    rows = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header != names:
            raise FormatError(f"line 1: header {header} does not match schema {names}")
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(columns):
                raise FormatError(f"line {lineno}: expected {len(columns)} fields, got {len(parts)}")
            rows.append(parts)
    num_cols = [i for i, k in enumerate(kinds) if k == "numeric"]
    cat_cols = [i for i, k in enumerate(kinds) if k == "categorical"]
    numeric = np.empty((len(rows), len(num_cols)))
    for j, col in enumerate(num_cols):
        for r, row in enumerate(rows):
            try:
                numeric[r, j] = float(row[col])
            except ValueError:
                raise FormatError(f"line {r + 2}: unparsable numeric {row[col]!r}") from None
    dictionaries = {}
    categorical = np.empty((len(rows), len(cat_cols)), dtype=np.int32)
    for j, col in enumerate(cat_cols):
        mapping = {}
        pending_missing = []
        for r, row in enumerate(rows):
            tok = row[col]
            if tok == MISSING:
                pending_missing.append(r)
                continue
            if tok not in mapping:
                mapping[tok] = len(mapping)
            categorical[r, j] = mapping[tok]
        missing_code = len(mapping)
        for r in pending_missing:
            categorical[r, j] = missing_code
        dictionaries[names[col]] = mapping
    if num_cols and cat_cols:
        return MixedData(numeric, categorical), dictionaries
    if num_cols:
        return DenseData(numeric), dictionaries
    return CategoricalData(categorical), dictionaries
