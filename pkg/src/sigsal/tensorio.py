"""Deterministic file I/O: NPY v1.0 tensors, PGM images, PPM overlays.

The tensor interchange format is NPY version 1.0 restricted to C-order
little-endian float64.  The header dict is padded with spaces so that the
length of magic + version + header-size field + header is a multiple of 64
and ends in a newline, matching what numpy itself writes.
"""

import ast
import struct

import numpy as np

from sigsal.errors import (
    FormatError,
    InvalidShape,
    InvalidValue,
    IoError,
    UnsupportedDtype,
    UnsupportedFormat,
)
from sigsal.numutil import as_tensor

_MAGIC = b"\x93NUMPY"


def write_tensor(t, path):
    """Write a rank 1..4 float64 tensor as NPY v1.0; inverse of read_tensor."""
    t = as_tensor(t, name="tensor")
    header = "{'descr': '<f8', 'fortran_order': False, 'shape': %s, }" % (
        repr(tuple(int(d) for d in t.shape)),
    )
    unpadded = len(_MAGIC) + 4 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    try:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(b"\x01\x00")
            fh.write(struct.pack("<H", len(header)))
            fh.write(header.encode("latin1"))
            fh.write(t.tobytes("C"))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_tensor(path):
    """Read an NPY v1.0 file written by write_tensor (or numpy.save)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    if len(raw) < 10 or raw[:6] != _MAGIC:
        raise FormatError(f"{path}: not an NPY file")
    if raw[6:8] != b"\x01\x00":
        raise FormatError(f"{path}: unsupported NPY version {raw[6]}.{raw[7]}")
    (hlen,) = struct.unpack("<H", raw[8:10])
    if len(raw) < 10 + hlen:
        raise FormatError(f"{path}: truncated header")
    try:
        header = ast.literal_eval(raw[10:10 + hlen].decode("latin1"))
        if not isinstance(header, dict):
            raise ValueError
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: malformed header") from exc

    descr = header.get("descr")
    if descr != "<f8":
        raise UnsupportedDtype(f"{path}: element type {descr!r}, expected '<f8'")
    if header.get("fortran_order") is not False:
        raise FormatError(f"{path}: only C-order payloads are supported")
    shape = header.get("shape")
    if (
        not isinstance(shape, tuple)
        or not shape
        or len(shape) > 4
        or any(not isinstance(d, int) or d < 1 for d in shape)
    ):
        raise InvalidShape(f"{path}: shape {shape!r} outside rank 1..4 with positive dims")

    count = 1
    for d in shape:
        count *= d
    payload = raw[10 + hlen:]
    if len(payload) != 8 * count:
        raise FormatError(
            f"{path}: payload holds {len(payload)} bytes, header declares {8 * count}"
        )
    data = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()  # own, writable
    if not np.isfinite(data).all():
        raise InvalidValue(f"{path}: payload contains NaN or Inf")
    return data


def _read_pgm_header(raw, path):
    """Tokenize 'P5 <w> <h> <maxval>' allowing # comments; return tokens + offset."""
    tokens = []
    i = 0
    while len(tokens) < 4:
        if i >= len(raw):
            raise FormatError(f"{path}: truncated header")
        c = raw[i:i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            while i < len(raw) and raw[i:i + 1] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < len(raw) and raw[j:j + 1] not in b" \t\r\n#":
                j += 1
            tokens.append(raw[i:j])
            i = j
    if i >= len(raw) or raw[i:i + 1] not in b" \t\r\n":
        raise FormatError(f"{path}: header not terminated by whitespace")
    return tokens, i + 1  # single whitespace byte separates header from pixels


def read_gray_image(path):
    """Read a binary 8-bit PGM (P5, maxval 255) as a rank-2 tensor in [0, 1]."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    tokens, offset = _read_pgm_header(raw, path)
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: magic {tokens[0]!r}, expected P5")
    try:
        width, height, maxval = (int(tok) for tok in tokens[1:])
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric header field") from exc
    if maxval != 255:
        raise UnsupportedFormat(f"{path}: maxval {maxval}, only 255 is supported")
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")
    pixels = raw[offset:offset + width * height]
    if len(pixels) != width * height:
        raise FormatError(f"{path}: truncated pixel data")
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    return img.astype(np.float64) / 255.0


def _quantize(values):
    """[0, 1] floats to bytes, round half up."""
    return np.clip(np.floor(values * 255.0 + 0.5), 0, 255).astype(np.uint8)


def write_gray_image(t, path):
    """Write a rank-2 [0, 1] tensor as binary PGM (values quantized x255)."""
    t = as_tensor(t, rank=2, name="image")
    h, w = t.shape
    try:
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(_quantize(t).tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_rgb_image(t, path):
    """Write an [h, w, 3] tensor in [0, 1] as binary PPM (P6)."""
    t = as_tensor(t, rank=3, name="image")
    if t.shape[2] != 3:
        raise InvalidShape(f"expected [h, w, 3], got {t.shape}")
    h, w = t.shape[:2]
    try:
        with open(path, "wb") as fh:
            fh.write(b"P6\n%d %d\n255\n" % (w, h))
            fh.write(_quantize(t).tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
