"""Coarse-to-fine appearance-flow estimation.

At the coarsest level a head predicts an initial flow from concatenated
person/garment features; each finer level upsamples the previous flow,
warps the garment features with it, and predicts a residual. The
parser-based variant modulates the coarse head's convolutions with a
global style vector pooled from the person features.

Flow heads are zero-initialized so a freshly built estimator yields the
identity warp.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .blocks import ModulatedConv2d, UpsampleFlow, WarpLayer, zero_init_conv
from .config import NetConfig


def _refine_channels(p: int) -> tuple[int, int, int]:
    return (min(128, 2 * p), min(64, p), max(min(32, p // 2), 4))


def _level_kernels(levels: int) -> list[int]:
    sizes = [7, 5] + [3] * max(levels - 2, 0)
    return sizes[:levels]


class FlowSubnet(nn.Module):
    """One level's flow predictor: conv stack over 2P channels -> 2-channel flow."""

    def __init__(self, in_ch: int, mids: tuple[int, int, int], kernel_size: int):
        super().__init__()
        m0, m1, m2 = mids
        self.body = nn.Sequential(
            nn.Conv2d(in_ch, m0, kernel_size, padding=kernel_size // 2),
            nn.LeakyReLU(0.2),
            nn.Conv2d(m0, m1, 3, padding=1),
            nn.LeakyReLU(0.2),
            nn.Conv2d(m1, m2, 3, padding=1),
            nn.LeakyReLU(0.2),
        )
        self.flow_head = zero_init_conv(nn.Conv2d(m2, 2, 3, padding=1))

    def forward(self, x):
        return self.flow_head(self.body(x))


class StyledFlowSubnet(nn.Module):
    """Coarse-flow predictor whose convs are modulated by a style vector."""

    def __init__(self, in_ch: int, mids: tuple[int, int, int], kernel_size: int, style_dim: int):
        super().__init__()
        m0, m1, m2 = mids
        self.conv1 = ModulatedConv2d(in_ch, m0, kernel_size)
        self.conv2 = ModulatedConv2d(m0, m1, 3)
        self.conv3 = ModulatedConv2d(m1, m2, 3)
        self.act = nn.LeakyReLU(0.2)
        self.affines = nn.ModuleList(
            [nn.Linear(style_dim, c) for c in (in_ch, m0, m1)]
        )
        for affine in self.affines:
            nn.init.zeros_(affine.weight)
            nn.init.ones_(affine.bias)
        self.flow_head = zero_init_conv(nn.Conv2d(m2, 2, 3, padding=1))

    def forward(self, x, style):
        h = self.act(self.conv1(x, self.affines[0](style)))
        h = self.act(self.conv2(h, self.affines[1](style)))
        h = self.act(self.conv3(h, self.affines[2](style)))
        return self.flow_head(h)


class FlowEstimator(nn.Module):
    """N-level flow pyramid estimator over two feature pyramids."""

    def __init__(self, cfg: NetConfig, styled: bool = False):
        super().__init__()
        p = cfg.pyramid_channels
        mids = _refine_channels(p)
        kernels = _level_kernels(cfg.levels)
        self.styled = styled
        if styled:
            self.coarse = StyledFlowSubnet(2 * p, mids, kernels[0], cfg.style_dim)
        else:
            self.coarse = FlowSubnet(2 * p, mids, kernels[0])
        self.refiners = nn.ModuleList(
            FlowSubnet(2 * p, mids, k) for k in kernels[1:]
        )
        self.warp = WarpLayer(pad="zeros")
        self.up = UpsampleFlow()

    def forward(self, person_feats, garment_feats, style=None):
        if len(person_feats) != len(garment_feats):
            raise ValueError("person and garment pyramids have different depths")
        if len(self.refiners) != len(person_feats) - 1:
            raise ValueError("pyramid depth does not match this estimator")
        if self.styled:
            if style is None:
                raise ValueError("styled flow estimator needs a style vector")
            flow = self.coarse(torch.cat([person_feats[0], garment_feats[0]], dim=1), style)
        else:
            flow = self.coarse(torch.cat([person_feats[0], garment_feats[0]], dim=1))
        flows = [flow]
        for refiner, p_feat, g_feat in zip(self.refiners, person_feats[1:], garment_feats[1:]):
            up = self.up(flows[-1])
            warped_g = self.warp(g_feat, up)
            delta = refiner(torch.cat([p_feat, warped_g], dim=1))
            flows.append(up + delta)
        return flows
