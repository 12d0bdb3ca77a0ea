"""Exact float64 column sums via integer mantissa accumulation.

Summing float64s is bracket-sensitive, so partitioned workers reducing
partial sums would not reproduce a single-worker run bit for bit.  Scaling
every value to an integer at 2^-1074 (the smallest subnormal) makes partial
sums exact, order-free, and cheap to merge; the final division rounds once.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_SCALE_BITS = 1074
_MANT = float(1 << 53)


def exact_column_sums(a: np.ndarray) -> list:
    """Per-column exact sums of a float64 matrix, as ints at scale 2^-1074."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.isfinite(a).all():
        raise ValueError("non-finite value in exact sum")
    mant, expo = np.frexp(a)
    M = (mant * _MANT).astype(np.int64)  # exact: |mant| has <= 52 fraction bits
    S = expo.astype(np.int64) + (_SCALE_BITS - 53)
    out = []
    for col in range(a.shape[1]):
        Mc, Sc = M[:, col], S[:, col]
        total = 0
        for shift in np.unique(Sc):
            sel = Mc[Sc == shift]
            part = 0
            for lo in range(0, sel.size, 512):  # |chunk sum| < 2^63
                part += int(sel[lo : lo + 512].sum())
            total += part << int(shift) if shift >= 0 else part >> int(-shift)
        out.append(total)
    return out


def exact_centroid_from_sums(sums, count: int) -> np.ndarray:
    """Correctly-rounded mean from exact scaled-integer sums."""
    denom = count << _SCALE_BITS
    return np.array([float(Fraction(s, denom)) for s in sums], dtype=np.float64)


def exact_centroid(vectors: np.ndarray) -> np.ndarray:
    """Mean of rows, identical no matter how the rows are partitioned."""
    return exact_centroid_from_sums(exact_column_sums(vectors), vectors.shape[0])


def pack_bigints(values) -> bytes:
    import struct

    out = [struct.pack("<q", len(values))]
    for v in values:
        b = int(v).to_bytes((int(v).bit_length() + 8) // 8 + 1, "little", signed=True)
        out.append(struct.pack("<q", len(b)))
        out.append(b)
    return b"".join(out)


def unpack_bigints(buf: bytes, offset: int = 0):
    import struct

    (count,) = struct.unpack_from("<q", buf, offset)
    offset += 8
    values = []
    for _ in range(count):
        (ln,) = struct.unpack_from("<q", buf, offset)
        offset += 8
        values.append(int.from_bytes(buf[offset : offset + ln], "little", signed=True))
        offset += ln
    return values, offset
