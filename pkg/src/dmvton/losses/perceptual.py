"""Pluggable perceptual feature extractors and the perceptual distance.

An extractor exposes ordered feature stages; each stage maps an image to
a feature raster. Extractors are fixed: gradients flow to the compared
images, never into extractor weights. The default desk-scale extractor is
a seeded, randomly initialized strided CNN; a pretrained backbone can be
plugged in behind the same interface.
"""

from __future__ import annotations

import torch
import torch.nn as nn

DEFAULT_EXTRACTOR_SEED = 2308


class IdentityExtractor(nn.Module):
    """Single stage returning the image itself; reduces the perceptual
    distance to a pixel distance. Mostly for tests and sanity checks."""

    num_stages = 1

    def features(self, image: torch.Tensor) -> list[torch.Tensor]:
        return [image]


class RandomFeatureExtractor(nn.Module):
    """Three strided conv stages with frozen, seed-reproducible random weights."""

    def __init__(
        self,
        in_channels: int = 3,
        widths: tuple[int, ...] = (16, 32, 64),
        seed: int = DEFAULT_EXTRACTOR_SEED,
        dtype: torch.dtype = torch.float32,
    ):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        self.stages_list = nn.ModuleList()
        prev = in_channels
        for width in widths:
            conv = nn.Conv2d(prev, width, 3, stride=2, padding=1, dtype=dtype)
            with torch.no_grad():
                fan_in = prev * 9
                conv.weight.copy_(
                    torch.randn(conv.weight.shape, generator=gen, dtype=torch.float64).to(dtype)
                    / fan_in**0.5
                )
                conv.bias.zero_()
            self.stages_list.append(nn.Sequential(conv, nn.LeakyReLU(0.2)))
            prev = width
        self.num_stages = len(widths)
        for p in self.parameters():
            p.requires_grad_(False)

    def features(self, image: torch.Tensor) -> list[torch.Tensor]:
        h = image.unsqueeze(0) if image.dim() == 3 else image
        out = []
        for stage in self.stages_list:
            h = stage(h)
            out.append(h[0] if image.dim() == 3 else h)
        return out


def embed(extractor, image: torch.Tensor) -> torch.Tensor:
    """Final-stage features pooled to a flat vector; the metric embedding."""
    feats = extractor.features(image)[-1]
    return feats.mean(dim=(-2, -1)).flatten()


def perceptual_loss(a: torch.Tensor, b: torch.Tensor, extractor) -> torch.Tensor:
    """Sum over stages of mean absolute feature differences."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")
    feats_a = extractor.features(a)
    feats_b = extractor.features(b)
    total = None
    for fa, fb in zip(feats_a, feats_b):
        term = (fa - fb).abs().mean()
        total = term if total is None else total + term
    return total


def lpips_like(
    a: torch.Tensor,
    b: torch.Tensor,
    extractor,
    stage_weights: list[float] | None = None,
) -> torch.Tensor:
    """Weighted sum over stages of spatially averaged, channel-normalized
    squared feature differences."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")
    feats_a = extractor.features(a)
    feats_b = extractor.features(b)
    if stage_weights is None:
        stage_weights = [1.0] * len(feats_a)
    if len(stage_weights) != len(feats_a):
        raise ValueError("one stage weight per extractor stage required")

    def unit(f: torch.Tensor) -> torch.Tensor:
        norm = torch.sqrt((f * f).sum(dim=-3, keepdim=True) + 1e-10)
        return f / norm

    total = None
    for w, fa, fb in zip(stage_weights, feats_a, feats_b):
        diff = unit(fa) - unit(fb)
        term = w * (diff * diff).sum(dim=-3).mean()
        total = term if total is None else total + term
    return total
