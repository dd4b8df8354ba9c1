# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: 2-D tap convolution with replicate borders.

Taps are accumulated in row-major tap order so results are bit-identical to
the pure-python fallback, which adds shifted views in the same order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def convolve2d_replicate(double[:, :, ::1] img, double[:, ::1] taps):
    cdef Py_ssize_t H = img.shape[0]
    cdef Py_ssize_t W = img.shape[1]
    cdef Py_ssize_t C = img.shape[2]
    cdef Py_ssize_t k = taps.shape[0]
    cdef Py_ssize_t r = k // 2
    out_arr = np.zeros((H, W, C), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t y, x, c, ky, kx, sy, sx
    cdef double w
    with nogil:
        for ky in range(k):
            for kx in range(k):
                w = taps[ky, kx]
                for y in range(H):
                    sy = y + ky - r
                    if sy < 0:
                        sy = 0
                    elif sy >= H:
                        sy = H - 1
                    for x in range(W):
                        sx = x + kx - r
                        if sx < 0:
                            sx = 0
                        elif sx >= W:
                            sx = W - 1
                        for c in range(C):
                            out[y, x, c] += w * img[sy, sx, c]
    return out_arr
