"""Differentiable appearance-flow warping.

The bilinear gather kernels exist twice: a compiled Cython extension
(`dmvton.warp._kernels`) and a pure-torch fallback. The compiled path is
chosen at import time when available; set ``DMVTON_WARP_BACKEND=torch`` or
``=cython`` to force one. ``benchmarks/bench_warp.py`` compares the two.
"""

from .functional import (
    PAD_MODES,
    apply_flow,
    charbonnier,
    second_order_smooth_loss,
    smooth_term_count,
    upsample_flow,
    validate_flow_pyramid,
    warp_backend,
)

__all__ = [
    "PAD_MODES",
    "apply_flow",
    "charbonnier",
    "second_order_smooth_loss",
    "smooth_term_count",
    "upsample_flow",
    "validate_flow_pyramid",
    "warp_backend",
]
