"""Writers for the interchange formats the saliency engine consumes.

Tensors go out as NPY v1.0, C-order little-endian float64 (numpy's own
writer emits exactly that for such arrays).  Grayscale images go out as
binary PGM.  All writes are atomic: data lands in a temp file that is
renamed into place.
"""

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def _atomic_write(path, write_fn):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_npy(array, path):
    """float64 C-order NPY v1.0."""
    data = np.ascontiguousarray(np.asarray(array), dtype=np.float64)
    _atomic_write(path, lambda fh: np.save(fh, data))


def write_pgm(image, path):
    """[0, 1] grayscale to binary PGM (maxval 255, round half up)."""
    img = np.asarray(image, dtype=np.float64)
    pixels = np.clip(np.floor(img * 255.0 + 0.5), 0, 255).astype(np.uint8)
    h, w = pixels.shape

    def write_fn(fh):
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(pixels.tobytes())

    _atomic_write(path, write_fn)


def write_json(payload, path):
    def write_fn(fh):
        fh.write(json.dumps(payload, indent=2, sort_keys=True).encode())
        fh.write(b"\n")

    _atomic_write(path, write_fn)
