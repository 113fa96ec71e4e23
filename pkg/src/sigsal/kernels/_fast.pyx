# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of sigsal.kernels.pure (same signatures, same semantics)."""

import numpy as np

cimport cython
from libc.math cimport exp
from libc.stdint cimport uint64_t


def bilateral(img, double sigma_spatial, double sigma_range, int radius):
    """Bilateral filter; window offsets accumulate in row-major order."""
    src_arr = np.ascontiguousarray(img, dtype=np.float64)
    cdef const double[:, ::1] src = src_arr
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double inv2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial)
    cdef double inv2sr = 1.0 / (2.0 * sigma_range * sigma_range)
    # spatial weights only depend on the offset: one table, not one exp per tap
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    table_arr = np.exp(-(offsets[:, None] ** 2 + offsets[None, :] ** 2) * inv2ss)
    cdef const double[:, ::1] table = table_arr
    cdef Py_ssize_t y, x, yy, xx, y0, y1, x0, x1
    cdef double center, nb, wgt, num, den, dv

    with nogil:
        for y in range(h):
            y0 = y - radius if y - radius > 0 else 0
            y1 = y + radius if y + radius < h - 1 else h - 1
            for x in range(w):
                x0 = x - radius if x - radius > 0 else 0
                x1 = x + radius if x + radius < w - 1 else w - 1
                center = src[y, x]
                num = 0.0
                den = 0.0
                for yy in range(y0, y1 + 1):
                    for xx in range(x0, x1 + 1):
                        nb = src[yy, xx]
                        dv = center - nb
                        wgt = table[yy - y + radius, xx - x + radius] * exp(-(dv * dv) * inv2sr)
                        num += wgt * nb
                        den += wgt
                out[y, x] = num / den
    return out_arr


def conv2d(x, kernel, bias, int stride, pads):
    """Strided cross-correlation with implicit zero padding."""
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    k_arr = np.ascontiguousarray(kernel, dtype=np.float64)
    b_arr = np.ascontiguousarray(bias, dtype=np.float64)
    cdef const double[:, :, ::1] src = x_arr
    cdef const double[:, :, :, ::1] ker = k_arr
    cdef const double[::1] bvec = b_arr
    cdef Py_ssize_t top = pads[0]
    cdef Py_ssize_t left = pads[2]
    cdef Py_ssize_t channels = src.shape[0]
    cdef Py_ssize_t h = src.shape[1]
    cdef Py_ssize_t w = src.shape[2]
    cdef Py_ssize_t n_out = ker.shape[0]
    cdef Py_ssize_t kh = ker.shape[2]
    cdef Py_ssize_t kw = ker.shape[3]
    cdef Py_ssize_t oh = (h + top + pads[1] - kh) // stride + 1
    cdef Py_ssize_t ow = (w + left + pads[3] - kw) // stride + 1
    out_arr = np.empty((n_out, oh, ow), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t o, i, j, c, ky, kx, yy, xx
    cdef double acc

    with nogil:
        for o in range(n_out):
            for i in range(oh):
                for j in range(ow):
                    acc = 0.0
                    for c in range(channels):
                        for ky in range(kh):
                            yy = i * stride + ky - top
                            if yy < 0 or yy >= h:
                                continue
                            for kx in range(kw):
                                xx = j * stride + kx - left
                                if xx < 0 or xx >= w:
                                    continue
                                acc += src[c, yy, xx] * ker[o, c, ky, kx]
                    out[o, i, j] = acc + bvec[o]
    return out_arr


def xoshiro_fill(state, out):
    """Fill ``out`` with uniforms in [0, 1); advances ``state`` in place.

    Bitwise identical to the pure backend: exact integer recurrence, doubles
    via (word >> 11) * 2^-53.
    """
    cdef uint64_t[::1] st = state
    cdef double[::1] res = out.reshape(-1)
    cdef uint64_t s0 = st[0]
    cdef uint64_t s1 = st[1]
    cdef uint64_t s2 = st[2]
    cdef uint64_t s3 = st[3]
    cdef uint64_t r, t
    cdef Py_ssize_t i, n = res.shape[0]

    with nogil:
        for i in range(n):
            r = s1 * 5
            r = ((r << 7) | (r >> 57)) * 9
            t = s1 << 17
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = (s3 << 45) | (s3 >> 19)
            res[i] = <double>(r >> 11) * (1.0 / 9007199254740992.0)
    st[0] = s0
    st[1] = s1
    st[2] = s2
    st[3] = s3
