"""The parser-free network used for inference: two mobile feature pyramids,
a flow estimator, and the mobile generator. Takes only a person image and
a garment image."""

from __future__ import annotations

import torch
import torch.nn as nn

from .blocks import UpsampleFlow, WarpLayer
from .config import NetConfig
from .flow import FlowEstimator
from .fpn import MobileFPN
from .generator import MobileUNet
from .teacher import TryOnResult


class StudentNetwork(nn.Module):
    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.person_fpn = MobileFPN(cfg, 3)
        self.garment_fpn = MobileFPN(cfg, 3)
        self.flow_net = FlowEstimator(cfg, styled=False)
        self.generator = MobileUNet(cfg, in_channels=6)
        self.full_up = UpsampleFlow()
        self.image_warp = WarpLayer(pad="zeros")

    def forward(self, person: torch.Tensor, garment: torch.Tensor) -> TryOnResult:
        if person.shape != garment.shape:
            raise ValueError(
                f"person {tuple(person.shape)} and garment {tuple(garment.shape)} differ"
            )
        person_feats = self.person_fpn(person)
        garment_feats = self.garment_fpn(garment)
        flows = self.flow_net(person_feats, garment_feats)
        full_flow = self.full_up(flows[-1])
        warped = self.image_warp(garment, full_flow)
        rendered, mask, tryon = self.generator(warped, person)
        return TryOnResult(warped, tryon, person_feats, flows, rendered, mask)


def student_forward(net: StudentNetwork, person: torch.Tensor, garment: torch.Tensor) -> TryOnResult:
    """Single-record convenience wrapper around the batched module."""
    res = net(person.unsqueeze(0), garment.unsqueeze(0))
    return TryOnResult(
        res.warped[0],
        res.tryon[0],
        [f[0] for f in res.person_features],
        [f[0] for f in res.flows],
        res.rendered[0],
        res.mask[0],
    )
