"""Building blocks: conv stacks, inverted residuals, modulated convolution.

Everything that computes is an nn.Module so the profiler can meter a
forward pass through hooks alone.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..warp import apply_flow, upsample_flow


def _norm(ch: int) -> nn.Module:
    return nn.InstanceNorm2d(ch, affine=True, track_running_stats=False)


class ConvNormAct(nn.Module):
    """3x3 (or kxk) conv + instance norm + leaky ReLU; the standard-conv unit."""

    def __init__(self, in_ch: int, out_ch: int, kernel_size: int = 3, stride: int = 1):
        super().__init__()
        self.conv = nn.Conv2d(
            in_ch, out_ch, kernel_size, stride=stride, padding=kernel_size // 2, bias=True
        )
        self.norm = _norm(out_ch)
        self.act = nn.LeakyReLU(0.2)

    def forward(self, x):
        return self.act(self.norm(self.conv(x)))


class InvertedResidual(nn.Module):
    """MobileNetV2 block: expand 1x1, depthwise 3x3, project 1x1.

    The skip-add applies iff stride == 1 and in/out channels match.
    """

    def __init__(self, in_ch: int, out_ch: int, stride: int = 1, expansion: int = 6):
        super().__init__()
        if stride not in (1, 2):
            raise ValueError("stride must be 1 or 2")
        hidden = in_ch * expansion
        self.use_residual = stride == 1 and in_ch == out_ch
        layers: list[nn.Module] = []
        if expansion != 1:
            layers += [nn.Conv2d(in_ch, hidden, 1, bias=False), _norm(hidden), nn.ReLU6()]
        layers += [
            nn.Conv2d(hidden, hidden, 3, stride=stride, padding=1, groups=hidden, bias=False),
            _norm(hidden),
            nn.ReLU6(),
            nn.Conv2d(hidden, out_ch, 1, bias=False),
            _norm(out_ch),
        ]
        self.branch = nn.Sequential(*layers)

    def forward(self, x):
        out = self.branch(x)
        return x + out if self.use_residual else out


class ModulatedConv2d(nn.Module):
    """Convolution with per-sample input-channel weight scaling + demodulation.

    ``scales`` is a (B, in_ch) tensor; an all-ones row reduces to a plain
    convolution with the demodulated weight.
    """

    def __init__(self, in_ch: int, out_ch: int, kernel_size: int = 3, demodulate: bool = True):
        super().__init__()
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.kernel_size = kernel_size
        self.demodulate = demodulate
        self.weight = nn.Parameter(
            torch.randn(out_ch, in_ch, kernel_size, kernel_size)
            / math.sqrt(in_ch * kernel_size * kernel_size)
        )
        self.bias = nn.Parameter(torch.zeros(out_ch))

    def forward(self, x: torch.Tensor, scales: torch.Tensor) -> torch.Tensor:
        b, c, h, w = x.shape
        if scales.shape != (b, c):
            raise ValueError(f"scales must be ({b}, {c}), got {tuple(scales.shape)}")
        weight = self.weight.unsqueeze(0) * scales.view(b, 1, c, 1, 1)
        if self.demodulate:
            denom = torch.rsqrt(weight.pow(2).sum(dim=(2, 3, 4)) + 1e-8)
            weight = weight * denom.view(b, self.out_ch, 1, 1, 1)
        weight = weight.reshape(b * self.out_ch, c, self.kernel_size, self.kernel_size)
        out = F.conv2d(
            x.reshape(1, b * c, h, w), weight, padding=self.kernel_size // 2, groups=b
        )
        return out.reshape(b, self.out_ch, h, w) + self.bias.view(1, -1, 1, 1)

    def demodulated_weight(self) -> torch.Tensor:
        """The effective kernel under all-ones scales."""
        if not self.demodulate:
            return self.weight
        denom = torch.rsqrt(self.weight.pow(2).sum(dim=(1, 2, 3)) + 1e-8)
        return self.weight * denom.view(-1, 1, 1, 1)


class WarpLayer(nn.Module):
    """Module wrapper over apply_flow so traced forwards can meter it."""

    def __init__(self, pad: str = "zeros"):
        super().__init__()
        self.pad = pad

    def forward(self, source, flow):
        return apply_flow(source, flow, pad=self.pad)


class UpsampleFlow(nn.Module):
    """Module wrapper over upsample_flow."""

    def forward(self, flow):
        return upsample_flow(flow)


class TryOnHead(nn.Module):
    """Emits a tanh-bounded rendered image and a logistic composition mask,
    then composes: out = mask * warped + (1 - mask) * rendered."""

    def __init__(self, in_ch: int):
        super().__init__()
        self.conv = nn.Conv2d(in_ch, 4, 3, padding=1)
        self.tanh = nn.Tanh()
        self.sigmoid = nn.Sigmoid()

    def forward(self, features, warped):
        raw = self.conv(features)
        rendered = self.tanh(raw[:, :3])
        mask = self.sigmoid(raw[:, 3:4])
        composed = mask * warped + (1 - mask) * rendered
        return rendered, mask, composed


def zero_init_conv(conv: nn.Conv2d) -> nn.Conv2d:
    nn.init.zeros_(conv.weight)
    if conv.bias is not None:
        nn.init.zeros_(conv.bias)
    return conv
