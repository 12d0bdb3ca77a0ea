"""Length-prefixed little-endian binary encoding for messages and artifacts.

Every payload is self-describing and round-trips exactly; artifact files add
a magic/version header.  Byte counts of these encodings are what the
engine's transport accounting measures.
"""

from __future__ import annotations

import struct

import numpy as np

from .data import Bucket, CentralVector, Clustering, SeedGroup

MAGIC = b"LSHC"
VERSION = 1

_DTYPES = {
    0: np.dtype("<f8"),
    1: np.dtype("<i8"),
    2: np.dtype("<i4"),
    3: np.dtype("<u8"),
}
_CODES = {v: k for k, v in _DTYPES.items()}


class FormatError(ValueError):
    """Malformed or truncated binary payload."""


def pack_array(a: np.ndarray) -> bytes:
    a = np.ascontiguousarray(a)
    code = _CODES.get(a.dtype.newbyteorder("<"))
    if code is None:
        raise FormatError(f"unsupported dtype {a.dtype}")
    head = struct.pack("<BB", code, a.ndim)
    head += struct.pack(f"<{a.ndim}q", *a.shape)
    body = a.astype(a.dtype.newbyteorder("<"), copy=False).tobytes()
    return struct.pack("<q", len(head) + len(body)) + head + body


def unpack_array(buf: bytes, offset: int = 0):
    if offset + 8 > len(buf):
        raise FormatError(f"truncated array header at byte {offset}")
    (length,) = struct.unpack_from("<q", buf, offset)
    offset += 8
    end = offset + length
    if end > len(buf):
        raise FormatError(f"truncated array body at byte {offset}")
    code, ndim = struct.unpack_from("<BB", buf, offset)
    offset += 2
    shape = struct.unpack_from(f"<{ndim}q", buf, offset)
    offset += 8 * ndim
    dtype = _DTYPES.get(code)
    if dtype is None:
        raise FormatError(f"unknown dtype code {code} at byte {offset}")
    n = int(np.prod(shape)) if ndim else 1
    a = np.frombuffer(buf, dtype=dtype, count=n, offset=offset).reshape(shape)
    return a.copy(), end


# --- engine message bodies --------------------------------------------------


def pack_fragment(table: int, kind: str, lo: int, body: np.ndarray) -> bytes:
    k = 0 if kind == "proj" else 1
    return struct.pack("<qBq", table, k, lo) + pack_array(
        body if k else body.astype("<f8")
    )


def unpack_fragment(buf: bytes):
    table, k, lo = struct.unpack_from("<qBq", buf, 0)
    body, _ = unpack_array(buf, 17)
    return int(table), ("proj" if k == 0 else "sig"), int(lo), body


def pack_seed_groups(groups) -> bytes:
    out = [struct.pack("<q", len(groups))]
    for g in groups:
        out.append(pack_array(g.members))
    return b"".join(out)


def unpack_seed_groups(buf: bytes) -> list:
    (count,) = struct.unpack_from("<q", buf, 0)
    offset = 8
    groups = []
    for _ in range(count):
        members, offset = unpack_array(buf, offset)
        groups.append(SeedGroup(members))
    return groups


def pack_center_stats(stats) -> bytes:
    from .numeric import pack_bigints

    out = [struct.pack("<q", len(stats))]
    for body, count in stats:
        if isinstance(body, list):  # exact scaled-integer centroid sums
            packed = pack_bigints(body)
            out.append(struct.pack("<qB", count, 0))
            out.append(struct.pack("<q", len(packed)))
            out.append(packed)
        else:
            out.append(struct.pack("<qB", count, 1))
            out.append(pack_array(np.asarray(body)))
    return b"".join(out)


def pack_bins(bins, buckets) -> bytes:
    """Reference encoding of full bins (bucket ids plus all their member
    ids); exists so tests can price a bin broadcast against the seed-group
    sync on the same fixture."""
    out = [struct.pack("<q", len(bins))]
    for b in bins:
        out.append(struct.pack("<q", len(b.bucket_indices)))
        for i in b.bucket_indices:
            bk = buckets[i]
            out.append(struct.pack("<qq", bk.table, bk.slot))
            out.append(pack_array(bk.members))
    return b"".join(out)


# --- artifact files ----------------------------------------------------------


def _header(tag: int) -> bytes:
    return MAGIC + struct.pack("<BB", VERSION, tag)


def _check_header(buf: bytes, tag: int):
    if buf[:4] != MAGIC:
        raise FormatError("bad magic; not an artifact file")
    version, found = struct.unpack_from("<BB", buf, 4)
    if version != VERSION:
        raise FormatError(f"unsupported artifact version {version}")
    if found != tag:
        raise FormatError(f"artifact holds tag {found}, expected {tag}")
    return 6


def dump_buckets(buckets) -> bytes:
    out = [_header(1), struct.pack("<q", len(buckets))]
    for b in buckets:
        out.append(struct.pack("<qq", b.table, b.slot))
        out.append(pack_array(b.members))
    return b"".join(out)


def load_buckets(buf: bytes) -> list:
    offset = _check_header(buf, 1)
    (count,) = struct.unpack_from("<q", buf, offset)
    offset += 8
    buckets = []
    for _ in range(count):
        table, slot = struct.unpack_from("<qq", buf, offset)
        members, offset = unpack_array(buf, offset + 16)
        buckets.append(Bucket(int(table), int(slot), members))
    return buckets


def dump_seed_groups(groups) -> bytes:
    return _header(2) + pack_seed_groups(groups)


def load_seed_groups(buf: bytes) -> list:
    offset = _check_header(buf, 2)
    return unpack_seed_groups(buf[offset:])


def dump_clustering(c: Clustering) -> bytes:
    out = [_header(3), struct.pack("<q", len(c.centers))]
    for cv in c.centers:
        out.append(struct.pack("<Bq", 0 if cv.kind == "centroid" else 1, cv.weight))
        out.append(pack_array(cv.values))
    out.append(pack_array(c.assignment))
    out.append(pack_array(c.radii))
    out.append(struct.pack("<d", c.objective))
    return b"".join(out)


def load_clustering(buf: bytes) -> Clustering:
    offset = _check_header(buf, 3)
    (k,) = struct.unpack_from("<q", buf, offset)
    offset += 8
    centers = []
    for _ in range(k):
        kind, weight = struct.unpack_from("<Bq", buf, offset)
        values, offset = unpack_array(buf, offset + 9)
        centers.append(
            CentralVector("centroid" if kind == 0 else "mode", values, int(weight))
        )
    assignment, offset = unpack_array(buf, offset)
    radii, offset = unpack_array(buf, offset)
    (objective,) = struct.unpack_from("<d", buf, offset)
    return Clustering(centers, assignment, radii, float(objective))
