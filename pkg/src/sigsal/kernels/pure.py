"""NumPy implementations of the hot kernels (fallback backend)."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_MASK = (1 << 64) - 1


def bilateral(img, sigma_spatial, sigma_range, radius):
    """Bilateral filter of a 2-D map.

    Weight of neighbor q for center p is
    exp(-|p-q|^2 / 2*ss^2) * exp(-(img[p]-img[q])^2 / 2*sr^2); the window is
    the (2*radius+1)^2 square clipped at the borders.  Accumulation runs over
    window offsets in fixed row-major order, so results are deterministic.
    """
    img = np.ascontiguousarray(img, dtype=np.float64)
    h, w = img.shape
    inv2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial)
    inv2sr = 1.0 / (2.0 * sigma_range * sigma_range)
    num = np.zeros((h, w))
    den = np.zeros((h, w))
    for dy in range(-radius, radius + 1):
        py0, py1 = max(0, -dy), h - max(0, dy)
        if py0 >= py1:
            continue
        for dx in range(-radius, radius + 1):
            px0, px1 = max(0, -dx), w - max(0, dx)
            if px0 >= px1:
                continue
            sw = np.exp(-(dy * dy + dx * dx) * inv2ss)
            center = img[py0:py1, px0:px1]
            neighbor = img[py0 + dy:py1 + dy, px0 + dx:px1 + dx]
            wgt = sw * np.exp(-((center - neighbor) ** 2) * inv2sr)
            num[py0:py1, px0:px1] += wgt * neighbor
            den[py0:py1, px0:px1] += wgt
    return num / den


def conv2d(x, kernel, bias, stride, pads):
    """Strided cross-correlation with zero padding.

    x: [C, H, W]; kernel: [O, C, kh, kw]; bias: [O];
    pads: (top, bottom, left, right).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    top, bottom, left, right = pads
    if top or bottom or left or right:
        x = np.pad(x, ((0, 0), (top, bottom), (left, right)))
    kh, kw = kernel.shape[2], kernel.shape[3]
    win = sliding_window_view(x, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    out = np.einsum("cijkl,ockl->oij", win, kernel, optimize=True)
    return out + bias[:, None, None]


def xoshiro_fill(state, out):
    """Fill ``out`` with uniforms in [0, 1) from a xoshiro256** state.

    ``state`` is a uint64[4] array, advanced in place.  Matches the compiled
    backend word for word.
    """
    s0, s1, s2, s3 = (int(v) for v in state)
    res = out.reshape(-1)
    for i in range(res.shape[0]):
        r = (s1 * 5) & _MASK
        r = ((((r << 7) | (r >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        res[i] = (r >> 11) * 2.0 ** -53
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3
