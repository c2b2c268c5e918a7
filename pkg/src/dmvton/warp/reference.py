"""Pure-torch bilinear backward warp, used when the compiled kernels are absent.

Same sampling semantics as the Cython kernels: ``out[c, y, x]`` is the
bilinear sample of the source at ``(x + u[y, x], y + v[y, x])`` in pixel
coordinates. Differentiable w.r.t. both source and flow through autograd.
"""

import torch


def warp_bilinear_torch(source: torch.Tensor, flow: torch.Tensor, pad_border: bool) -> torch.Tensor:
    b, c, h, w = source.shape
    dtype = source.dtype
    xs = torch.arange(w, dtype=dtype)
    ys = torch.arange(h, dtype=dtype)
    grid_y, grid_x = torch.meshgrid(ys, xs, indexing="ij")
    gx = grid_x.unsqueeze(0) + flow[:, 0]
    gy = grid_y.unsqueeze(0) + flow[:, 1]

    if pad_border:
        gx = gx.clamp(0, w - 1)
        gy = gy.clamp(0, h - 1)
        x0 = gx.floor().clamp(0, max(w - 2, 0))
        y0 = gy.floor().clamp(0, max(h - 2, 0))
    else:
        x0 = gx.floor()
        y0 = gy.floor()
    fx = gx - x0
    fy = gy - y0
    x0i = x0.long()
    y0i = y0.long()
    x1i = x0i + 1
    y1i = y0i + 1
    if pad_border:
        x1i = x1i.clamp(0, w - 1)
        y1i = y1i.clamp(0, h - 1)

    flat = source.reshape(b, c, h * w)

    def tap(yi: torch.Tensor, xi: torch.Tensor) -> torch.Tensor:
        if pad_border:
            valid = None
        else:
            valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        idx = (yi.clamp(0, h - 1) * w + xi.clamp(0, w - 1)).reshape(b, 1, h * w).expand(b, c, h * w)
        vals = flat.gather(2, idx).reshape(b, c, h, w)
        if valid is not None:
            vals = vals * valid.unsqueeze(1).to(dtype)
        return vals

    w00 = ((1 - fx) * (1 - fy)).unsqueeze(1)
    w01 = (fx * (1 - fy)).unsqueeze(1)
    w10 = ((1 - fx) * fy).unsqueeze(1)
    w11 = (fx * fy).unsqueeze(1)
    return (
        w00 * tap(y0i, x0i)
        + w01 * tap(y0i, x1i)
        + w10 * tap(y1i, x0i)
        + w11 * tap(y1i, x1i)
    )
