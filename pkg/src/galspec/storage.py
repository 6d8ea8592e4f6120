"""File formats shared across the toolkit.

Binary container layout (all integers little-endian):

    8 bytes   magic  b"GSPEC01\\n"
    uint32    number of named arrays
    per array:
        uint16   name length, then the utf-8 name
        uint8    ndim
        uint64 * ndim   shape
        float64 * prod(shape)   row-major little-endian data
    uint32    length of a utf-8 JSON metadata blob, then the blob

Datasets also round-trip through headerless CSV (one row per point).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"GSPEC01\n"


def save_arrays(path, arrays: dict, meta: dict | None = None) -> None:
    """Write named float64 arrays plus JSON metadata to the container."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(np.asarray(arr, dtype="<f8"))
            enc = name.encode("utf-8")
            fh.write(struct.pack("<H", len(enc)))
            fh.write(enc)
            fh.write(struct.pack("<B", arr.ndim))
            for dim in arr.shape:
                fh.write(struct.pack("<Q", dim))
            fh.write(arr.tobytes(order="C"))
        blob = json.dumps(meta or {}).encode("utf-8")
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)


def load_arrays(path) -> tuple[dict, dict]:
    """Read back (arrays, meta) from :func:`save_arrays` output."""
    raw = Path(path).read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a recognized array container")
    off = len(MAGIC)
    (count,) = struct.unpack_from("<I", raw, off)
    off += 4
    arrays = {}
    for _ in range(count):
        (nlen,) = struct.unpack_from("<H", raw, off)
        off += 2
        name = raw[off : off + nlen].decode("utf-8")
        off += nlen
        (ndim,) = struct.unpack_from("<B", raw, off)
        off += 1
        shape = struct.unpack_from(f"<{ndim}Q", raw, off)
        off += 8 * ndim
        size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        arr = np.frombuffer(raw, dtype="<f8", count=size, offset=off)
        off += 8 * size
        arrays[name] = arr.reshape(shape).astype(float)
    (mlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    meta = json.loads(raw[off : off + mlen].decode("utf-8"))
    return arrays, meta


def save_dataset_csv(path, data: np.ndarray) -> None:
    np.savetxt(path, np.asarray(data, dtype=float), delimiter=",")


def load_dataset_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite dataset entries")
    return data


def load_dataset(path) -> np.ndarray:
    """Dataset from either the binary container or headerless CSV."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        arrays, _ = load_arrays(path)
        if "points" not in arrays:
            raise ValueError(f"{path}: container has no 'points' array")
        return arrays["points"]
    return load_dataset_csv(path)


def save_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())
