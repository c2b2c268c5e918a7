"""Network builders and forward passes."""

import torch

from ..core import weights as _weights
from .blocks import (
    ConvNormAct,
    InvertedResidual,
    ModulatedConv2d,
    TryOnHead,
    UpsampleFlow,
    WarpLayer,
)
from .config import PRESETS, NetConfig, get_preset
from .flow import FlowEstimator, FlowSubnet, StyledFlowSubnet
from .fpn import MobileFPN, PlainFPN
from .generator import MobileUNet, UNetGenerator
from .student import StudentNetwork, student_forward
from .teacher import TeacherNetwork, TryOnResult, preserved_region, teacher_forward


def build_teacher(cfg: NetConfig, seed: int | None = None) -> TeacherNetwork:
    if seed is not None:
        torch.manual_seed(seed)
    return TeacherNetwork(cfg)


def build_student(cfg: NetConfig, seed: int | None = None) -> StudentNetwork:
    if seed is not None:
        torch.manual_seed(seed)
    return StudentNetwork(cfg)


def net_config_meta(cfg: NetConfig) -> dict:
    return {
        "levels": cfg.levels,
        "base_channels": list(cfg.base_channels),
        "image_size": list(cfg.image_size),
        "seg_channels": cfg.seg_channels,
        "expansion": cfg.expansion,
    }


def net_config_from_meta(meta: dict) -> NetConfig:
    return NetConfig(
        levels=int(meta["levels"]),
        base_channels=tuple(meta["base_channels"]),
        image_size=tuple(meta["image_size"]),
        seg_channels=int(meta.get("seg_channels", 7)),
        expansion=int(meta.get("expansion", 6)),
    )


def save_net(net: torch.nn.Module, path, role: str) -> None:
    """Writes a network's tensors to a single-file weight archive."""
    meta = {"role": role, "net": net_config_meta(net.cfg)}
    data = _weights.save_weights(_weights.state_dict_to_archive(net), meta=meta)
    with open(path, "wb") as fh:
        fh.write(data)


def load_net(path, expected_role: str | None = None):
    """Rebuilds a network from a single-file weight archive."""
    with open(path, "rb") as fh:
        data = fh.read()
    meta = _weights.load_weights_meta(data)
    role = meta.get("role")
    if expected_role is not None and role != expected_role:
        raise ValueError(f"archive at {path} holds {role!r} weights, expected {expected_role!r}")
    if "net" not in meta:
        raise ValueError(f"archive at {path} carries no network metadata")
    cfg = net_config_from_meta(meta["net"])
    net = TeacherNetwork(cfg) if role == "teacher" else StudentNetwork(cfg)
    _weights.load_archive_into(net, _weights.load_weights(data))
    net.eval()
    return net
