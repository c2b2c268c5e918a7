"""Training objectives: gated distillation, warp-stage and generation
composites, and the pluggable perceptual distance."""

from .composite import DistillationContext, LossWeights, gen_loss, warp_stage_loss
from .distill import distillation_gate, distillation_loss
from .perceptual import (
    DEFAULT_EXTRACTOR_SEED,
    IdentityExtractor,
    RandomFeatureExtractor,
    embed,
    lpips_like,
    perceptual_loss,
)
