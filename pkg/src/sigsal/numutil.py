"""Shared numeric utilities: validation, normalization, resizing, similarity."""

import numpy as np

from sigsal.errors import DegenerateInput, InvalidShape, InvalidValue


def as_tensor(x, rank=None, name="input"):
    """Coerce to a C-order float64 array and enforce the engine's invariants.

    Rank must be 1..4 (or the explicit ``rank``), dimensions positive, all
    elements finite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if rank is not None:
        allowed = (rank,) if isinstance(rank, int) else tuple(rank)
        if arr.ndim not in allowed:
            raise InvalidShape(f"{name}: expected rank {allowed}, got {arr.ndim}")
    elif not 1 <= arr.ndim <= 4:
        raise InvalidShape(f"{name}: rank must be 1..4, got {arr.ndim}")
    if arr.size == 0:
        raise InvalidShape(f"{name}: dimensions must be positive, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidValue(f"{name}: contains NaN or Inf")
    return np.ascontiguousarray(arr)


def minmax_normalize(t):
    """Affine rescale to [0, 1]; a constant input maps to all zeros."""
    t = as_tensor(t)
    lo = t.min()
    hi = t.max()
    if hi == lo:
        return np.zeros_like(t)
    return (t - lo) / (hi - lo)


def resize_bilinear(t, out_h, out_w):
    """Bilinear resample of a rank-2 array to (out_h, out_w).

    Source coordinates use half-pixel centers, (i + 0.5) * in/out - 0.5,
    clamped to [0, in-1].  Constants are preserved exactly and the output
    never leaves the input's value range.
    """
    t = as_tensor(t, rank=2, name="resize input")
    out_h, out_w = int(out_h), int(out_w)
    if out_h < 1 or out_w < 1:
        raise InvalidShape(f"output dims must be >= 1, got {(out_h, out_w)}")
    in_h, in_w = t.shape

    src_y = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0, in_h - 1)
    src_x = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0, in_w - 1)
    y0 = src_y.astype(np.int64)
    x0 = src_x.astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (src_y - y0)[:, None]
    fx = (src_x - x0)[None, :]

    tl = t[np.ix_(y0, x0)]
    tr = t[np.ix_(y0, x1)]
    bl = t[np.ix_(y1, x0)]
    br = t[np.ix_(y1, x1)]
    # difference form keeps constants bit-exact
    top = tl + fx * (tr - tl)
    bot = bl + fx * (br - bl)
    out = top + fy * (bot - top)
    return np.clip(out, t.min(), t.max())


def cosine_similarity(a, b):
    """<a, b> / (|a| |b|), clipped to [-1, 1]."""
    a = as_tensor(a, name="a").ravel()
    b = as_tensor(b, name="b").ravel()
    if a.shape != b.shape:
        raise InvalidShape(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInput("cosine similarity of a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _fractional_ranks(v):
    """Average-rank (fractional) ranking of a flat array."""
    order = np.argsort(v, kind="stable")
    sorted_v = v[order]
    ranks = np.empty(v.shape[0])
    i = 0
    while i < v.shape[0]:
        j = i
        while j + 1 < v.shape[0] and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j)  # average of tied positions
        i = j + 1
    return ranks


def spearman_rank(a, b):
    """Spearman rank correlation: Pearson correlation of fractional ranks."""
    a = as_tensor(a, name="a").ravel()
    b = as_tensor(b, name="b").ravel()
    if a.shape != b.shape:
        raise InvalidShape(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.shape[0] < 2:
        raise InvalidShape("need at least 2 elements")
    ra = _fractional_ranks(a)
    rb = _fractional_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.linalg.norm(ra) * np.linalg.norm(rb)
    if denom == 0.0:
        raise DegenerateInput("rank correlation of a constant input")
    return float(np.clip(np.dot(ra, rb) / denom, -1.0, 1.0))
