"""Stage losses: the warping objective and the generation objective.

Warp stage: weighted sum of pixel L1 against the masked person, a
perceptual term, the second-order flow smoothness, and the gated
distillation term. Generation stage: pixel L1 plus perceptual between
the try-on result and the person. Both return a per-component breakdown
for logging.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import NamedTuple

import torch

from ..warp import second_order_smooth_loss
from .distill import distillation_loss
from .perceptual import perceptual_loss


@dataclass(frozen=True)
class LossWeights:
    warp_l1: float = 1.0
    warp_perceptual: float = 0.2
    smooth: float = 6.0
    distill: float = 0.04
    gen_l1: float = 1.0
    gen_perceptual: float = 0.2

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (value >= 0 and value == value and abs(value) != float("inf")):
                raise ValueError(f"loss weight {name} must be a finite non-negative real")

    def scaled(self, k: float) -> "LossWeights":
        return LossWeights(**{name: k * v for name, v in asdict(self).items()})


class DistillationContext(NamedTuple):
    """Everything the gated distillation term needs from the parser-based pass."""

    teacher_feats: list[torch.Tensor]
    student_feats: list[torch.Tensor]
    teacher_out: torch.Tensor
    student_out: torch.Tensor


def _component(name: str, value: torch.Tensor, errors_from: str):
    if not torch.isfinite(value.detach()).all():
        raise FloatingPointError(f"{errors_from}: component {name} is non-finite")
    return value


def warp_stage_loss(
    warped_garment: torch.Tensor,
    person: torch.Tensor,
    garment_mask: torch.Tensor,
    flows: list[torch.Tensor],
    distill_ctx: DistillationContext | None,
    weights: LossWeights,
    extractor=None,
) -> tuple[torch.Tensor, dict[str, float]]:
    if warped_garment.shape != person.shape:
        raise ValueError("warped garment and person are not spatially aligned")
    if garment_mask.shape[-2:] != person.shape[-2:]:
        raise ValueError("garment mask and person are not spatially aligned")
    mask = garment_mask if garment_mask.dim() >= person.dim() else garment_mask.unsqueeze(-3)
    target = person * mask

    components: dict[str, torch.Tensor] = {}
    components["warp_l1"] = _component(
        "warp_l1", (warped_garment - target).abs().mean(), "warp stage"
    )
    if weights.warp_perceptual > 0:
        if extractor is None:
            raise ValueError("warp stage: perceptual weight is set but no extractor given")
        components["warp_perceptual"] = _component(
            "warp_perceptual", perceptual_loss(warped_garment, target, extractor), "warp stage"
        )
    if weights.smooth > 0:
        components["smooth"] = _component(
            "smooth", second_order_smooth_loss(flows), "warp stage"
        )
    if weights.distill > 0 and distill_ctx is not None:
        components["distill"] = _component(
            "distill",
            distillation_loss(
                distill_ctx.teacher_feats,
                distill_ctx.student_feats,
                distill_ctx.teacher_out,
                distill_ctx.student_out,
                person,
            ),
            "warp stage",
        )

    weight_of = {
        "warp_l1": weights.warp_l1,
        "warp_perceptual": weights.warp_perceptual,
        "smooth": weights.smooth,
        "distill": weights.distill,
    }
    total = torch.zeros((), dtype=person.dtype)
    for name, value in components.items():
        total = total + weight_of[name] * value
    return total, {name: float(v.detach()) for name, v in components.items()}


def gen_loss(
    tryon: torch.Tensor,
    person: torch.Tensor,
    extractor,
    weights: LossWeights,
) -> tuple[torch.Tensor, dict[str, float]]:
    if tryon.shape != person.shape:
        raise ValueError(
            f"shape mismatch: {tuple(tryon.shape)} vs {tuple(person.shape)}"
        )
    components = {"gen_l1": _component("gen_l1", (tryon - person).abs().mean(), "gen stage")}
    if weights.gen_perceptual > 0:
        if extractor is None:
            raise ValueError("gen stage: perceptual weight is set but no extractor given")
        components["gen_perceptual"] = _component(
            "gen_perceptual", perceptual_loss(tryon, person, extractor), "gen stage"
        )
    weight_of = {"gen_l1": weights.gen_l1, "gen_perceptual": weights.gen_perceptual}
    total = torch.zeros((), dtype=person.dtype)
    for name, value in components.items():
        total = total + weight_of[name] * value
    return total, {name: float(v.detach()) for name, v in components.items()}
