"""Human representation: body-parser map plus pose heatmaps.

This is the parser-based side's extra input. The parser map is one-hot
over segmentation classes; the heatmaps are one Gaussian bump per
keypoint. All rasters share the person image's spatial size.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .pose import NUM_KEYPOINTS, MIN_CONFIDENCE, PoseKeypoints

# Default 7-class body-parser layout.
SEG_CLASSES = ("background", "hair", "face", "upper_clothes", "left_arm", "right_arm", "lower_body")
UPPER_CLOTHES_CHANNEL = 3


def one_hot_parser_map(labels: torch.Tensor, num_classes: int) -> torch.Tensor:
    """(H, W) integer class raster -> (num_classes, H, W) one-hot float raster."""
    if labels.dim() != 2:
        raise ValueError(f"labels must be (H, W), got {tuple(labels.shape)}")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError("label raster contains out-of-range class ids")
    oh = torch.nn.functional.one_hot(labels.long(), num_classes)
    return oh.permute(2, 0, 1).float()


def pose_heatmaps(
    pose: PoseKeypoints, height: int, width: int, sigma: float = 3.0
) -> torch.Tensor:
    """Renders one Gaussian bump per keypoint into a (17, H, W) raster."""
    ys = torch.arange(height, dtype=torch.float32).view(-1, 1)
    xs = torch.arange(width, dtype=torch.float32).view(1, -1)
    maps = torch.zeros(NUM_KEYPOINTS, height, width)
    for i in range(NUM_KEYPOINTS):
        x, y, conf = pose.points[i]
        if conf < MIN_CONFIDENCE:
            continue
        d2 = (xs - float(x)) ** 2 + (ys - float(y)) ** 2
        maps[i] = torch.exp(-d2 / (2 * sigma * sigma))
    return maps


@dataclass
class HumanRepresentation:
    parser_map: torch.Tensor  # (K_seg, H, W), one-hot
    pose_heatmaps: torch.Tensor  # (17, H, W)
    densepose_proxy: torch.Tensor | None = None

    def __post_init__(self):
        if self.parser_map.dim() != 3:
            raise ValueError("parser_map must be (K, H, W)")
        sums = self.parser_map.sum(dim=0)
        if not torch.allclose(sums, torch.ones_like(sums), atol=1e-5):
            raise ValueError("parser_map channels must sum to 1 at every pixel")
        if self.pose_heatmaps.shape != (NUM_KEYPOINTS, *self.parser_map.shape[1:]):
            raise ValueError("pose_heatmaps spatial size must match parser_map")
        if self.densepose_proxy is not None and (
            self.densepose_proxy.shape[1:] != self.parser_map.shape[1:]
        ):
            raise ValueError("densepose_proxy spatial size must match parser_map")

    @property
    def spatial_size(self) -> tuple[int, int]:
        return self.parser_map.shape[1], self.parser_map.shape[2]

    @property
    def channels(self) -> int:
        extra = 0 if self.densepose_proxy is None else self.densepose_proxy.shape[0]
        return self.parser_map.shape[0] + self.pose_heatmaps.shape[0] + extra

    def as_tensor(self) -> torch.Tensor:
        parts = [self.parser_map, self.pose_heatmaps]
        if self.densepose_proxy is not None:
            parts.append(self.densepose_proxy)
        return torch.cat(parts, dim=0)

    @classmethod
    def build(
        cls,
        labels: torch.Tensor,
        pose: PoseKeypoints,
        num_classes: int = len(SEG_CLASSES),
        heatmap_sigma: float = 3.0,
    ) -> "HumanRepresentation":
        h, w = labels.shape
        return cls(
            parser_map=one_hot_parser_map(labels, num_classes),
            pose_heatmaps=pose_heatmaps(pose, h, w, heatmap_sigma),
        )
