"""Feature pyramid extractors.

Both variants share the layout: a stem, one stride-2 stage per level, 1x1
lateral projections to a common pyramid width, and a nearest-upsample
top-down path with 3x3 smoothing. Pyramids are returned coarsest first.
The mobile variant stacks inverted residuals; the plain variant (used by
the parser-based network) stacks standard convolutions.
"""

from __future__ import annotations

import torch.nn as nn

from .blocks import ConvNormAct, InvertedResidual, _norm
from .config import NetConfig


class _FPNBase(nn.Module):
    def __init__(self, cfg: NetConfig, stem: nn.Module, stages: list[nn.Module]):
        super().__init__()
        p = cfg.pyramid_channels
        self.cfg = cfg
        self.stem = stem
        self.stages = nn.ModuleList(stages)
        self.laterals = nn.ModuleList(
            nn.Conv2d(c, p, 1) for c in cfg.base_channels
        )
        self.smooth = nn.ModuleList(
            nn.Conv2d(p, p, 3, padding=1) for _ in cfg.base_channels
        )
        self.upsample = nn.Upsample(scale_factor=2, mode="nearest")

    def forward(self, x):
        h, w = x.shape[-2:]
        div = 2**self.cfg.levels
        if h % div or w % div:
            raise ValueError(f"input size {(h, w)} not divisible by {div}")
        feats = []
        h_ = self.stem(x)
        for stage in self.stages:
            h_ = stage(h_)
            feats.append(h_)
        # feats is finest-first (stride 2 ... stride 2^N); merge top-down.
        laterals = [lat(f) for lat, f in zip(self.laterals, feats)]
        n = len(laterals)
        merged = [None] * n
        merged[n - 1] = self.smooth[n - 1](laterals[n - 1])
        for i in range(n - 2, -1, -1):
            merged[i] = self.smooth[i](laterals[i] + self.upsample(merged[i + 1]))
        return merged[::-1]  # coarsest first


class MobileFPN(_FPNBase):
    def __init__(self, cfg: NetConfig, in_channels: int):
        c0 = cfg.base_channels[0]
        stem = nn.Sequential(
            nn.Conv2d(in_channels, c0, 3, padding=1, bias=False), _norm(c0), nn.ReLU6()
        )
        stages = []
        prev = c0
        for c in cfg.base_channels:
            stages.append(
                nn.Sequential(
                    InvertedResidual(prev, c, stride=2, expansion=cfg.expansion),
                    InvertedResidual(c, c, stride=1, expansion=cfg.expansion),
                )
            )
            prev = c
        super().__init__(cfg, stem, stages)


class PlainFPN(_FPNBase):
    def __init__(self, cfg: NetConfig, in_channels: int, width_multiplier: float = 1.0):
        widths = [max(8, int(round(c * width_multiplier))) for c in cfg.base_channels]
        c0 = widths[0]
        stem = ConvNormAct(in_channels, c0, 3, stride=1)
        stages = []
        prev = c0
        for c in widths:
            stages.append(
                nn.Sequential(ConvNormAct(prev, c, 3, stride=2), ConvNormAct(c, c, 3, stride=1))
            )
            prev = c
        super().__init__(cfg, stem, stages)
        # laterals must match the (possibly widened) stage outputs
        p = cfg.pyramid_channels
        self.laterals = nn.ModuleList(nn.Conv2d(c, p, 1) for c in widths)
