"""Try-on generators: UNet-shaped encoder/decoders with skip connections.

Both take the warped garment concatenated with a person context image and
emit a rendered image plus a soft composition mask; the try-on result is
mask * warped + (1 - mask) * rendered, so outputs stay inside [-1, 1].
The mobile variant is built from inverted residuals, the plain variant
from standard conv blocks.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .blocks import ConvNormAct, InvertedResidual, TryOnHead, _norm
from .config import NetConfig


class _UNetBase(nn.Module):
    def __init__(self, widths: tuple[int, ...]):
        super().__init__()
        self.widths = widths
        self.upsample = nn.Upsample(scale_factor=2, mode="nearest")
        self.head = TryOnHead(widths[0])

    def forward(self, warped, context):
        x = torch.cat([warped, context], dim=1)
        h = self.stem(x)
        skips = []
        for down in self.downs:
            skips.append(h)
            h = down(h)
        h = self.bottleneck(h)
        for up_block, skip in zip(self.ups, reversed(skips)):
            h = self.upsample(h)
            h = up_block(torch.cat([h, skip], dim=1))
        return self.head(h, warped)


class MobileUNet(_UNetBase):
    """The lightweight generator (inverted-residual UNet)."""

    def __init__(self, cfg: NetConfig, in_channels: int = 6):
        widths = (cfg.base_channels[0],) + cfg.base_channels
        super().__init__(widths)
        exp = cfg.expansion
        self.stem = nn.Sequential(
            nn.Conv2d(in_channels, widths[0], 3, padding=1, bias=False),
            _norm(widths[0]),
            nn.ReLU6(),
        )
        self.downs = nn.ModuleList(
            InvertedResidual(widths[i], widths[i + 1], stride=2, expansion=exp)
            for i in range(cfg.levels)
        )
        self.bottleneck = InvertedResidual(widths[-1], widths[-1], stride=1, expansion=exp)
        self.ups = nn.ModuleList(
            InvertedResidual(widths[i + 1] + widths[i], widths[i], stride=1, expansion=exp)
            for i in reversed(range(cfg.levels))
        )


class UNetGenerator(_UNetBase):
    """Standard-convolution generator for the parser-based network."""

    def __init__(self, cfg: NetConfig, in_channels: int = 6, width_multiplier: float = 2.0):
        base = [min(512, int(round(c * width_multiplier))) for c in cfg.base_channels]
        widths = (base[0],) + tuple(base)
        super().__init__(widths)
        self.stem = ConvNormAct(in_channels, widths[0], 3)
        self.downs = nn.ModuleList(
            nn.Sequential(
                ConvNormAct(widths[i], widths[i + 1], 3, stride=2),
                ConvNormAct(widths[i + 1], widths[i + 1], 3),
            )
            for i in range(cfg.levels)
        )
        self.bottleneck = ConvNormAct(widths[-1], widths[-1], 3)
        self.ups = nn.ModuleList(
            nn.Sequential(
                ConvNormAct(widths[i + 1] + widths[i], widths[i], 3),
                ConvNormAct(widths[i], widths[i], 3),
            )
            for i in reversed(range(cfg.levels))
        )
