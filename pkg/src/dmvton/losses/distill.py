"""Gated feature distillation.

The distillation term transfers parser-based feature knowledge to the
parser-free extractor, but only while the parser-based output is actually
the better reconstruction: the gate compares mean-L1 errors of the two
try-on results against the ground-truth person image and shuts the loss
off otherwise. Gradients reach the parser-free features only; everything
from the parser-based side is treated as a constant.
"""

from __future__ import annotations

import torch


def distillation_gate(
    teacher_out: torch.Tensor, student_out: torch.Tensor, person: torch.Tensor
) -> bool:
    """True iff the parser-based result is strictly closer to the target in mean L1."""
    with torch.no_grad():
        t_err = (teacher_out - person).abs().mean()
        s_err = (student_out - person).abs().mean()
        return bool(t_err < s_err)


def distillation_loss(
    teacher_feats: list[torch.Tensor],
    student_feats: list[torch.Tensor],
    teacher_out: torch.Tensor,
    student_out: torch.Tensor,
    person: torch.Tensor,
) -> torch.Tensor:
    """Gated sum over pyramid levels of the L2 norm of feature differences."""
    if len(teacher_feats) != len(student_feats):
        raise ValueError(
            f"pyramid depth mismatch: {len(teacher_feats)} vs {len(student_feats)}"
        )
    for i, (tf, sf) in enumerate(zip(teacher_feats, student_feats)):
        if tf.shape != sf.shape:
            raise ValueError(f"level {i} shape mismatch: {tuple(tf.shape)} vs {tuple(sf.shape)}")
    ref = student_feats[0] if student_feats else student_out
    if not distillation_gate(teacher_out, student_out, person):
        return torch.zeros((), dtype=ref.dtype)
    total = torch.zeros((), dtype=ref.dtype)
    for tf, sf in zip(teacher_feats, student_feats):
        total = total + torch.linalg.vector_norm(tf.detach() - sf)
    return total
