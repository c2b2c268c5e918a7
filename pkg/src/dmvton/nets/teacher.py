"""The parser-based network: feature extraction, style-driven warping, generation.

Runs only at training time, producing synthetic inputs and feature
supervision for the parser-free network. Its flow estimator's coarse
stage is modulated by a global style vector pooled from the coarsest
person features.
"""

from __future__ import annotations

from typing import NamedTuple

import torch
import torch.nn as nn

from ..core.human import UPPER_CLOTHES_CHANNEL, HumanRepresentation
from .blocks import UpsampleFlow, WarpLayer
from .config import NetConfig
from .flow import FlowEstimator
from .fpn import PlainFPN
from .generator import UNetGenerator


class TryOnResult(NamedTuple):
    warped: torch.Tensor
    tryon: torch.Tensor
    person_features: list[torch.Tensor]
    flows: list[torch.Tensor]
    rendered: torch.Tensor
    mask: torch.Tensor


def preserved_region(person: torch.Tensor, parser_map: torch.Tensor) -> torch.Tensor:
    """Person pixels outside the upper-clothes parser channel."""
    keep = 1.0 - parser_map[:, UPPER_CLOTHES_CHANNEL : UPPER_CLOTHES_CHANNEL + 1]
    return person * keep


class TeacherNetwork(nn.Module):
    # Standard-conv widths sized so the parser-free network's FLOPs come in
    # at roughly half of this network's at the paper preset.
    FPN_WIDTH = 3.0
    GEN_WIDTH = 3.0

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.person_fpn = PlainFPN(cfg, cfg.human_rep_channels, width_multiplier=self.FPN_WIDTH)
        self.garment_fpn = PlainFPN(cfg, 3, width_multiplier=self.FPN_WIDTH)
        p = cfg.pyramid_channels
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.style_mlp = nn.Sequential(
            nn.Linear(p, cfg.style_dim), nn.LeakyReLU(0.2), nn.Linear(cfg.style_dim, cfg.style_dim)
        )
        self.flow_net = FlowEstimator(cfg, styled=True)
        self.generator = UNetGenerator(cfg, in_channels=6, width_multiplier=self.GEN_WIDTH)
        self.full_up = UpsampleFlow()
        self.image_warp = WarpLayer(pad="zeros")

    def forward(
        self, human_rep: torch.Tensor, garment: torch.Tensor, person: torch.Tensor
    ) -> TryOnResult:
        """All inputs batched: human_rep (B, K+17, H, W); garment/person (B, 3, H, W)."""
        person_feats = self.person_fpn(human_rep)
        garment_feats = self.garment_fpn(garment)
        style = self.style_mlp(self.pool(person_feats[0]).flatten(1))
        flows = self.flow_net(person_feats, garment_feats, style)
        full_flow = self.full_up(flows[-1])
        warped = self.image_warp(garment, full_flow)
        parser_map = human_rep[:, : self.cfg.seg_channels]
        preserved = preserved_region(person, parser_map)
        rendered, mask, tryon = self.generator(warped, preserved)
        return TryOnResult(warped, tryon, person_feats, flows, rendered, mask)


def teacher_forward(
    net: TeacherNetwork,
    human_rep: HumanRepresentation,
    garment: torch.Tensor,
    person: torch.Tensor,
) -> TryOnResult:
    """Single-record convenience wrapper around the batched module."""
    if human_rep is None:
        raise ValueError("the parser-based network requires a human representation")
    res = net(
        human_rep.as_tensor().unsqueeze(0), garment.unsqueeze(0), person.unsqueeze(0)
    )
    return TryOnResult(
        res.warped[0],
        res.tryon[0],
        [f[0] for f in res.person_features],
        [f[0] for f in res.flows],
        res.rendered[0],
        res.mask[0],
    )
