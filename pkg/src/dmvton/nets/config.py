"""Network sizing configuration and the two presets."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class NetConfig:
    """Shared sizing for every network in the system.

    ``levels`` is the pyramid depth N; pyramid level k (coarsest first)
    lives at image_size / 2^(N-k), so the finest level sits at stride 2
    and the image size must divide by 2^N.
    """

    levels: int
    base_channels: tuple[int, ...]
    image_size: tuple[int, int]
    seg_channels: int = 7
    expansion: int = 6
    heatmap_channels: int = 17

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("levels must be >= 2")
        if len(self.base_channels) != self.levels:
            raise ValueError("base_channels must have one entry per level")
        h, w = self.image_size
        div = 2**self.levels
        if h % div or w % div:
            raise ValueError(f"image size {self.image_size} must be divisible by {div}")
        if self.seg_channels < 2:
            raise ValueError("seg_channels must be >= 2")

    @property
    def pyramid_channels(self) -> int:
        return self.base_channels[-1]

    @property
    def style_dim(self) -> int:
        return max(self.pyramid_channels // 2, 8)

    @property
    def human_rep_channels(self) -> int:
        return self.seg_channels + self.heatmap_channels

    def level_sizes(self) -> list[tuple[int, int]]:
        """Spatial sizes coarsest-first."""
        h, w = self.image_size
        return [(h >> (self.levels - k), w >> (self.levels - k)) for k in range(self.levels)]


PRESETS = {
    "tiny": NetConfig(levels=3, base_channels=(8, 16, 24), image_size=(64, 48)),
    "paper": NetConfig(levels=5, base_channels=(32, 64, 128, 256, 256), image_size=(256, 192)),
}


def get_preset(name: str) -> NetConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
