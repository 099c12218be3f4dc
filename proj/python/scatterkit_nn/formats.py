"""REAL1 / CPLX1 matrix files and their JSON sidecars."""

import json
import os
import struct
from pathlib import Path

import numpy as np

REAL_MAGIC = b"REAL1\0\0\0"
CPLX_MAGIC = b"CPLX1\0\0\0"


def _header(magic, rows, cols):
    return magic + struct.pack("<II", rows, cols)


def write_real1(path, a):
    a = np.ascontiguousarray(a, dtype="<f8")
    rows, cols = a.shape
    with open(path, "wb") as f:
        f.write(_header(REAL_MAGIC, rows, cols))
        f.write(a.tobytes(order="C"))


def write_cplx1(path, a):
    a = np.ascontiguousarray(a, dtype="<c16")
    rows, cols = a.shape
    with open(path, "wb") as f:
        f.write(_header(CPLX_MAGIC, rows, cols))
        f.write(a.tobytes(order="C"))


def read_matrix(path):
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise ValueError(f"{path}: truncated header")
    magic = raw[:8]
    rows, cols = struct.unpack("<II", raw[8:16])
    if magic == REAL_MAGIC:
        dtype = "<f8"
    elif magic == CPLX_MAGIC:
        dtype = "<c16"
    else:
        raise ValueError(f"{path}: unknown magic {magic!r}")
    data = np.frombuffer(raw, dtype=dtype, offset=16)
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows}x{cols} entries, found {data.size}")
    return data.reshape(rows, cols).copy()


def write_sidecar(path, meta):
    tmp = str(path) + ".json.tmp"
    with open(tmp, "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    os.replace(tmp, str(path) + ".json")


def read_sidecar(path):
    with open(str(path) + ".json") as f:
        return json.load(f)
