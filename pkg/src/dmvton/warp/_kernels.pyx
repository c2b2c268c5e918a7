# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Bilinear backward-warp kernels: forward sampling plus analytic gradients.

These are the hot inner loops of flow-based garment warping. Tensors are
C-contiguous (B, C, H, W) images and (B, 2, H, W) flows, f32 or f64.
``pad_border=0`` zeroes out-of-range taps, ``pad_border=1`` clamps sample
coordinates to the image border before interpolating.
"""

from libc.math cimport floor

ctypedef fused floating:
    float
    double


def warp_forward(floating[:, :, :, ::1] src,
                 floating[:, :, :, ::1] flow,
                 floating[:, :, :, ::1] out,
                 int pad_border):
    cdef Py_ssize_t B = src.shape[0], C = src.shape[1]
    cdef Py_ssize_t H = src.shape[2], W = src.shape[3]
    cdef Py_ssize_t b, c, y, x, x0, y0, x1, y1
    cdef floating gx, gy, fx, fy, w00, w01, w10, w11, acc
    cdef bint in00, in01, in10, in11

    with nogil:
        for b in range(B):
            for y in range(H):
                for x in range(W):
                    gx = x + flow[b, 0, y, x]
                    gy = y + flow[b, 1, y, x]
                    if pad_border:
                        if gx < 0:
                            gx = 0
                        if gx > W - 1:
                            gx = W - 1
                        if gy < 0:
                            gy = 0
                        if gy > H - 1:
                            gy = H - 1
                        x0 = <Py_ssize_t>floor(gx)
                        y0 = <Py_ssize_t>floor(gy)
                        if x0 > W - 2:
                            x0 = W - 2 if W > 1 else 0
                        if y0 > H - 2:
                            y0 = H - 2 if H > 1 else 0
                        x1 = x0 + 1 if W > 1 else x0
                        y1 = y0 + 1 if H > 1 else y0
                        in00 = in01 = in10 = in11 = True
                    else:
                        x0 = <Py_ssize_t>floor(gx)
                        y0 = <Py_ssize_t>floor(gy)
                        x1 = x0 + 1
                        y1 = y0 + 1
                        in00 = 0 <= x0 < W and 0 <= y0 < H
                        in01 = 0 <= x1 < W and 0 <= y0 < H
                        in10 = 0 <= x0 < W and 0 <= y1 < H
                        in11 = 0 <= x1 < W and 0 <= y1 < H
                    fx = gx - x0
                    fy = gy - y0
                    w00 = (1 - fx) * (1 - fy)
                    w01 = fx * (1 - fy)
                    w10 = (1 - fx) * fy
                    w11 = fx * fy
                    for c in range(C):
                        acc = 0
                        if in00:
                            acc = acc + w00 * src[b, c, y0, x0]
                        if in01:
                            acc = acc + w01 * src[b, c, y0, x1]
                        if in10:
                            acc = acc + w10 * src[b, c, y1, x0]
                        if in11:
                            acc = acc + w11 * src[b, c, y1, x1]
                        out[b, c, y, x] = acc


def warp_backward(floating[:, :, :, ::1] src,
                  floating[:, :, :, ::1] flow,
                  floating[:, :, :, ::1] grad_out,
                  floating[:, :, :, ::1] grad_src,
                  floating[:, :, :, ::1] grad_flow,
                  int pad_border):
    """Accumulates into zero-initialized grad_src / grad_flow."""
    cdef Py_ssize_t B = src.shape[0], C = src.shape[1]
    cdef Py_ssize_t H = src.shape[2], W = src.shape[3]
    cdef Py_ssize_t b, c, y, x, x0, y0, x1, y1
    cdef floating gx, gy, fx, fy, w00, w01, w10, w11
    cdef floating v00, v01, v10, v11, go, gfx, gfy
    cdef bint in00, in01, in10, in11, sat_x, sat_y

    with nogil:
        for b in range(B):
            for y in range(H):
                for x in range(W):
                    gx = x + flow[b, 0, y, x]
                    gy = y + flow[b, 1, y, x]
                    sat_x = sat_y = False
                    if pad_border:
                        if gx < 0 or gx > W - 1:
                            sat_x = True
                            gx = 0 if gx < 0 else W - 1
                        if gy < 0 or gy > H - 1:
                            sat_y = True
                            gy = 0 if gy < 0 else H - 1
                        x0 = <Py_ssize_t>floor(gx)
                        y0 = <Py_ssize_t>floor(gy)
                        if x0 > W - 2:
                            x0 = W - 2 if W > 1 else 0
                        if y0 > H - 2:
                            y0 = H - 2 if H > 1 else 0
                        x1 = x0 + 1 if W > 1 else x0
                        y1 = y0 + 1 if H > 1 else y0
                        in00 = in01 = in10 = in11 = True
                    else:
                        x0 = <Py_ssize_t>floor(gx)
                        y0 = <Py_ssize_t>floor(gy)
                        x1 = x0 + 1
                        y1 = y0 + 1
                        in00 = 0 <= x0 < W and 0 <= y0 < H
                        in01 = 0 <= x1 < W and 0 <= y0 < H
                        in10 = 0 <= x0 < W and 0 <= y1 < H
                        in11 = 0 <= x1 < W and 0 <= y1 < H
                    fx = gx - x0
                    fy = gy - y0
                    w00 = (1 - fx) * (1 - fy)
                    w01 = fx * (1 - fy)
                    w10 = (1 - fx) * fy
                    w11 = fx * fy
                    gfx = 0
                    gfy = 0
                    for c in range(C):
                        go = grad_out[b, c, y, x]
                        v00 = src[b, c, y0, x0] if in00 else 0
                        v01 = src[b, c, y0, x1] if in01 else 0
                        v10 = src[b, c, y1, x0] if in10 else 0
                        v11 = src[b, c, y1, x1] if in11 else 0
                        if in00:
                            grad_src[b, c, y0, x0] += w00 * go
                        if in01:
                            grad_src[b, c, y0, x1] += w01 * go
                        if in10:
                            grad_src[b, c, y1, x0] += w10 * go
                        if in11:
                            grad_src[b, c, y1, x1] += w11 * go
                        gfx = gfx + go * ((1 - fy) * (v01 - v00) + fy * (v11 - v10))
                        gfy = gfy + go * ((1 - fx) * (v10 - v00) + fx * (v11 - v01))
                    grad_flow[b, 0, y, x] = 0 if sat_x else gfx
                    grad_flow[b, 1, y, x] = 0 if sat_y else gfy
