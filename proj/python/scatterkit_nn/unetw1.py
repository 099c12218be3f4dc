"""UNETW1 weight files.

Layout (little-endian): 8-byte magic "UNETW1\\0\\0", u32 tensor count, then per
tensor a u16 name length, the UTF-8 name, u8 ndim, u32 dims, float32 data in
row-major order; footer u32 CRC32 over the concatenated "name:d0xd1x..."
strings of the architecture.
"""

import struct
import zlib

import numpy as np

MAGIC = b"UNETW1\0\0"


def _conv(name, out_ch, in_ch, k):
    return [(name + ".weight", (out_ch, in_ch, k, k)), (name + ".bias", (out_ch,))]


ARCHITECTURE = (
    _conv("enc1.conv1", 32, 1, 3)
    + _conv("enc1.conv2", 32, 32, 3)
    + _conv("enc2.conv1", 64, 32, 3)
    + _conv("enc2.conv2", 64, 64, 3)
    + _conv("enc3.conv1", 128, 64, 3)
    + _conv("enc3.conv2", 128, 128, 3)
    + _conv("bottleneck.conv1", 256, 128, 3)
    + _conv("bottleneck.conv2", 256, 256, 3)
    + _conv("dec3.up", 128, 256, 3)
    + _conv("dec3.conv1", 128, 256, 3)
    + _conv("dec3.conv2", 128, 128, 3)
    + _conv("dec2.up", 64, 128, 3)
    + _conv("dec2.conv1", 64, 128, 3)
    + _conv("dec2.conv2", 64, 64, 3)
    + _conv("dec1.up", 32, 64, 3)
    + _conv("dec1.conv1", 32, 64, 3)
    + _conv("dec1.conv2", 32, 32, 3)
    + _conv("head", 1, 32, 1)
)


def fingerprint(layers=ARCHITECTURE):
    text = "".join(name + ":" + "x".join(str(d) for d in shape) for name, shape in layers)
    return zlib.crc32(text.encode("utf-8")) & 0xFFFFFFFF


def check_architecture(tensors):
    """Raises ValueError naming the first tensor that departs from the contract."""
    for i, ((name, shape), (got_name, arr)) in enumerate(zip(ARCHITECTURE, tensors)):
        if got_name != name or tuple(arr.shape) != shape:
            raise ValueError(f"layer {i} is {got_name!r} {tuple(arr.shape)}, expected {name!r} {shape}")
    if len(tensors) != len(ARCHITECTURE):
        raise ValueError(f"expected {len(ARCHITECTURE)} tensors, got {len(tensors)}")


def encode(tensors):
    """Bytes of a UNETW1 file for a list of (name, array) pairs."""
    check_architecture(tensors)
    out = [MAGIC, struct.pack("<I", len(tensors))]
    for name, arr in tensors:
        raw = name.encode("utf-8")
        out.append(struct.pack("<H", len(raw)))
        out.append(raw)
        out.append(struct.pack("<B", arr.ndim))
        out.append(struct.pack("<%dI" % arr.ndim, *arr.shape))
        out.append(np.ascontiguousarray(arr, dtype="<f4").tobytes(order="C"))
    out.append(struct.pack("<I", fingerprint()))
    return b"".join(out)


def write(path, tensors):
    with open(path, "wb") as f:
        f.write(encode(tensors))


def decode(raw):
    if raw[:8] != MAGIC:
        raise ValueError("bad UNETW1 magic")
    pos = 8
    (count,) = struct.unpack_from("<I", raw, pos)
    pos += 4
    tensors = []
    for _ in range(count):
        (length,) = struct.unpack_from("<H", raw, pos)
        pos += 2
        name = raw[pos : pos + length].decode("utf-8")
        pos += length
        (ndim,) = struct.unpack_from("<B", raw, pos)
        pos += 1
        shape = struct.unpack_from("<%dI" % ndim, raw, pos)
        pos += 4 * ndim
        n = int(np.prod(shape)) if ndim else 1
        arr = np.frombuffer(raw, dtype="<f4", count=n, offset=pos).reshape(shape).copy()
        pos += 4 * n
        tensors.append((name, arr))
    (fp,) = struct.unpack_from("<I", raw, pos)
    if pos + 4 != len(raw):
        raise ValueError("trailing bytes after the fingerprint")
    if fp != fingerprint():
        raise ValueError(f"fingerprint {fp:#010x} does not match the architecture")
    check_architecture(tensors)
    return tensors


def read(path):
    with open(path, "rb") as f:
        return decode(f.read())
