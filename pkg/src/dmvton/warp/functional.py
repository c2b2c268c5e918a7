"""Appearance-flow warping and the flow-regularity losses.

A flow field is a (2, H, W) tensor of per-pixel displacements in pixel
units: channel 0 moves along x (width), channel 1 along y (height).
``apply_flow`` gathers: out(x) = source(x + f(x)). A flow pyramid is a
list of flow fields ordered coarsest first, each level twice the spatial
size of the previous one.
"""

from __future__ import annotations

import os
from typing import Sequence

import torch
import torch.nn.functional as F

from . import reference

try:
    from . import _kernels
except ImportError:  # pragma: no cover - exercised via DMVTON_WARP_BACKEND
    _kernels = None

_env = os.environ.get("DMVTON_WARP_BACKEND", "").strip().lower()
if _env in ("cython", "compiled") and _kernels is None:
    raise ImportError("DMVTON_WARP_BACKEND=cython but dmvton.warp._kernels is not built")
if _env in ("torch", "python", "pure"):
    _DEFAULT_BACKEND = "torch"
elif _env in ("cython", "compiled"):
    _DEFAULT_BACKEND = "cython"
else:
    _DEFAULT_BACKEND = "cython" if _kernels is not None else "torch"

PAD_MODES = ("zeros", "border")


def warp_backend() -> str:
    """Name of the backend used by default: 'cython' or 'torch'."""
    return _DEFAULT_BACKEND


class _CompiledWarp(torch.autograd.Function):
    @staticmethod
    def forward(ctx, source, flow, pad_border):
        out = torch.empty_like(source)
        _kernels.warp_forward(
            source.detach().numpy(), flow.detach().numpy(), out.numpy(), int(pad_border)
        )
        ctx.save_for_backward(source, flow)
        ctx.pad_border = pad_border
        return out

    @staticmethod
    def backward(ctx, grad_out):
        source, flow = ctx.saved_tensors
        grad_src = torch.zeros_like(source)
        grad_flow = torch.zeros_like(flow)
        _kernels.warp_backward(
            source.detach().numpy(),
            flow.detach().numpy(),
            grad_out.contiguous().detach().numpy(),
            grad_src.numpy(),
            grad_flow.numpy(),
            int(ctx.pad_border),
        )
        return grad_src, grad_flow, None


def apply_flow(
    source: torch.Tensor,
    flow: torch.Tensor,
    pad: str = "zeros",
    backend: str | None = None,
) -> torch.Tensor:
    """Backward-warps ``source`` by ``flow``: out(x) = source(x + f(x)).

    Accepts (C, H, W) / (2, H, W) or batched (B, C, H, W) / (B, 2, H, W).
    Differentiable w.r.t. both arguments.
    """
    if pad not in PAD_MODES:
        raise ValueError(f"pad must be one of {PAD_MODES}, got {pad!r}")
    squeeze = source.dim() == 3
    src = source.unsqueeze(0) if squeeze else source
    flw = flow.unsqueeze(0) if flow.dim() == 3 else flow
    if src.dim() != 4 or flw.dim() != 4 or flw.shape[1] != 2:
        raise ValueError(f"bad shapes: source {tuple(source.shape)}, flow {tuple(flow.shape)}")
    if src.shape[0] != flw.shape[0] or src.shape[-2:] != flw.shape[-2:]:
        raise ValueError(
            f"source {tuple(src.shape)} and flow {tuple(flw.shape)} are not spatially aligned"
        )
    if not torch.isfinite(flw).all():
        raise ValueError("flow contains non-finite values")

    chosen = backend or _DEFAULT_BACKEND
    if chosen == "cython":
        if _kernels is None:
            raise RuntimeError("compiled warp kernels are not available")
        out = _CompiledWarp.apply(src.contiguous(), flw.contiguous(), pad == "border")
    elif chosen == "torch":
        out = reference.warp_bilinear_torch(src, flw, pad == "border")
    else:
        raise ValueError(f"unknown warp backend {chosen!r}")
    return out.squeeze(0) if squeeze else out


def charbonnier(x, eps: float = 1e-3, alpha: float = 0.45):
    """Generalized robust penalty (x^2 + eps^2)^alpha; even, smooth, minimal at 0."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if isinstance(x, torch.Tensor):
        return (x * x + eps * eps) ** alpha
    return float((x * x + eps * eps) ** alpha)


def second_order_smooth_loss(
    pyramid: Sequence[torch.Tensor], eps: float = 1e-3, alpha: float = 0.45
) -> torch.Tensor:
    """Charbonnier-penalized second differences, summed over all levels.

    For every grid point t and each of the four direction axes (horizontal,
    vertical, two diagonals) the term f(t-pi) + f(t+pi) - 2 f(t) is
    penalized; points whose neighbors fall outside the grid contribute
    nothing. Applied to the u and v channels independently and summed.
    """
    levels = list(pyramid)
    if not levels:
        raise ValueError("empty flow pyramid")
    total = None
    for flow in levels:
        f = flow.unsqueeze(0) if flow.dim() == 3 else flow
        hor = f[..., :, :-2] + f[..., :, 2:] - 2 * f[..., :, 1:-1]
        ver = f[..., :-2, :] + f[..., 2:, :] - 2 * f[..., 1:-1, :]
        dia = f[..., :-2, :-2] + f[..., 2:, 2:] - 2 * f[..., 1:-1, 1:-1]
        ant = f[..., :-2, 2:] + f[..., 2:, :-2] - 2 * f[..., 1:-1, 1:-1]
        for term in (hor, ver, dia, ant):
            part = charbonnier(term, eps, alpha).sum()
            total = part if total is None else total + part
    return total


def smooth_term_count(height: int, width: int) -> int:
    """Number of summands second_order_smooth_loss sees for one 2-channel level."""
    hor = height * max(width - 2, 0)
    ver = max(height - 2, 0) * width
    dia = max(height - 2, 0) * max(width - 2, 0)
    return 2 * (hor + ver + 2 * dia)


def upsample_flow(flow: torch.Tensor) -> torch.Tensor:
    """Doubles a flow field's spatial size bilinearly and rescales displacements by 2."""
    squeeze = flow.dim() == 3
    f = flow.unsqueeze(0) if squeeze else flow
    up = F.interpolate(f, scale_factor=2, mode="bilinear", align_corners=False) * 2
    return up.squeeze(0) if squeeze else up


def validate_flow_pyramid(pyramid: Sequence[torch.Tensor]) -> None:
    """Checks coarsest-first ordering with exact 2x growth between levels."""
    levels = list(pyramid)
    if not levels:
        raise ValueError("empty flow pyramid")
    for i, level in enumerate(levels):
        if level.shape[-3] != 2:
            raise ValueError(f"level {i} does not have 2 displacement channels")
        if i:
            prev = levels[i - 1]
            if level.shape[-2] != 2 * prev.shape[-2] or level.shape[-1] != 2 * prev.shape[-1]:
                raise ValueError(f"level {i} is not exactly 2x the size of level {i - 1}")
