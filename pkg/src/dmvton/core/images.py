"""Image tensors and file I/O.

Network-side images are float tensors shaped (C, H, W) with values in
[-1, 1]; files are 8-bit PNG/JPEG. Masks are (H, W) tensors with values
in {0, 1}.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image


def to_unit_range(u8: np.ndarray) -> np.ndarray:
    """Maps 8-bit [0, 255] to [-1, 1]."""
    return u8.astype(np.float32) / 127.5 - 1.0


def to_u8(data: np.ndarray) -> np.ndarray:
    """Maps [-1, 1] back to 8-bit; inverse of to_unit_range for all 256 values."""
    return np.clip(np.rint((data + 1.0) * 127.5), 0, 255).astype(np.uint8)


def validate_image(t: torch.Tensor, name: str = "image") -> torch.Tensor:
    if t.dim() != 3 or t.shape[0] < 1:
        raise ValueError(f"{name} must be (C, H, W), got {tuple(t.shape)}")
    if not torch.isfinite(t).all():
        raise ValueError(f"{name} contains non-finite values")
    return t

def validate_mask(t: torch.Tensor, name: str = "mask") -> torch.Tensor:
    if t.dim() != 2:
        raise ValueError(f"{name} must be (H, W), got {tuple(t.shape)}")
    bad = ((t != 0) & (t != 1)).any()
    if bad:
        raise ValueError(f"{name} is not binary")
    return t


def resize_image(t: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    """Bilinear resize of a (C, H, W) tensor to (height, width)."""
    h, w = size
    if h <= 0 or w <= 0:
        raise ValueError(f"target size must be positive, got {size}")
    if t.shape[-2:] == (h, w):
        return t
    return F.interpolate(t.unsqueeze(0), size=(h, w), mode="bilinear", align_corners=False)[0]


def load_image(path: str | Path, target_size: tuple[int, int] | None = None) -> torch.Tensor:
    """Decodes a PNG/JPEG into a [-1, 1] (3, H, W) tensor, bilinearly resized."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image file not found: {path}")
    try:
        with Image.open(path) as img:
            arr = np.asarray(img.convert("RGB"))
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ValueError(f"cannot decode image {path}: {exc}") from exc
    t = torch.from_numpy(to_unit_range(arr)).permute(2, 0, 1).contiguous()
    if target_size is not None:
        t = resize_image(t, target_size)
    return t


def save_image(t: torch.Tensor, path: str | Path) -> None:
    """Writes a [-1, 1] (C, H, W) tensor as an 8-bit PNG."""
    validate_image(t)
    arr = to_u8(t.detach().cpu().numpy())
    if arr.shape[0] == 1:
        img = Image.fromarray(arr[0], mode="L")
    else:
        img = Image.fromarray(np.moveaxis(arr, 0, 2), mode="RGB")
    img.save(Path(path))


def load_mask(path: str | Path, target_size: tuple[int, int] | None = None) -> torch.Tensor:
    """Loads a grayscale mask file into a {0, 1}-valued (H, W) tensor."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"mask file not found: {path}")
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    t = torch.from_numpy((arr > 127).astype(np.float32))
    if target_size is not None:
        t = (resize_image(t.unsqueeze(0), target_size)[0] > 0.5).float()
    return t


def center_crop_aspect(t: torch.Tensor, aspect_hw: float) -> torch.Tensor:
    """Center-crops (C, H, W) to the given height/width ratio."""
    _, h, w = t.shape
    if h / w > aspect_hw:
        new_h = int(round(w * aspect_hw))
        top = (h - new_h) // 2
        return t[:, top : top + new_h, :]
    new_w = int(round(h / aspect_hw))
    left = (w - new_w) // 2
    return t[:, :, left : left + new_w]
