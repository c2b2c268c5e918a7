"""Procedural stick-figure try-on scenes.

Generates fully labeled desk-scale records: a person (head, arms, torso
wearing a striped garment, legs), the matching product-style garment
image, the worn-region mask, COCO keypoints, and a parser map. The worn
garment and the product image sample the same stripe pattern, so the
ground-truth correspondence is an affine map a warping module can learn.

Frames for the pose-enrichment pipeline additionally carry keypoint
markers: 3x3 patches with a color signature encoding the keypoint index,
which the marker-reading estimator decodes back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..core.human import SEG_CLASSES, HumanRepresentation
from ..core.images import save_image, to_u8
from ..core.pose import NUM_KEYPOINTS, PoseKeypoints
from ..core.records import DatasetRecord, write_manifest
from PIL import Image

BACKGROUND = np.array([-0.85, -0.85, -0.80], dtype=np.float32)
SKIN = np.array([0.45, 0.10, -0.25], dtype=np.float32)
HAIR = np.array([-0.55, -0.70, -0.75], dtype=np.float32)
PANTS = np.array([-0.60, -0.55, -0.10], dtype=np.float32)
PRODUCT_BG = np.array([0.90, 0.90, 0.90], dtype=np.float32)

LBL_BACKGROUND, LBL_HAIR, LBL_FACE, LBL_UPPER, LBL_LEFT_ARM, LBL_RIGHT_ARM, LBL_LOWER = range(7)

MARKER_CH0 = 1.0
MARKER_CH2 = -1.0


def _grids(h: int, w: int):
    return np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")


def _rect_mask(h, w, y0, y1, x0, x1):
    yy, xx = _grids(h, w)
    return (yy >= y0) & (yy < y1) & (xx >= x0) & (xx < x1)

def _disk_mask(h, w, cy, cx, radius):
    yy, xx = _grids(h, w)
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def _segment_mask(h, w, p0, p1, radius):
    yy, xx = _grids(h, w)
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    denom = dx * dx + dy * dy
    if denom == 0:
        return _disk_mask(h, w, y0, x0, radius)
    t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / denom, 0.0, 1.0)
    dist2 = (xx - (x0 + t * dx)) ** 2 + (yy - (y0 + t * dy)) ** 2
    return dist2 <= radius**2


def _paint(img: np.ndarray, labels: np.ndarray, mask: np.ndarray, color: np.ndarray, label: int):
    img[:, mask] = color[:, None]
    labels[mask] = label


@dataclass
class GarmentStyle:
    color_a: np.ndarray
    color_b: np.ndarray
    stripes: int

    @classmethod
    def sample(cls, rng: np.random.Generator) -> "GarmentStyle":
        base = rng.uniform(-0.7, 0.7, size=3).astype(np.float32)
        alt = np.clip(base + rng.uniform(0.35, 0.8) * rng.choice([-1.0, 1.0]), -0.95, 0.95)
        return cls(base, alt.astype(np.float32), int(rng.integers(3, 7)))

    def pattern(self, h: int, w: int) -> np.ndarray:
        """(3, h, w) stripe pattern; stripes are fractions of the patch height."""
        v = (np.arange(h, dtype=np.float64) + 0.5) / h
        band = (np.floor(v * self.stripes).astype(int) % 2).astype(bool)
        out = np.empty((3, h, w), dtype=np.float32)
        out[:, ~band, :] = self.color_a[:, None, None]
        out[:, band, :] = self.color_b[:, None, None]
        return out


@dataclass
class PoseParams:
    cx: float
    y_top: float
    half_width: float
    torso_height: float
    raised_left: bool
    raised_right: bool

    @classmethod
    def sample(cls, rng: np.random.Generator, h: int, w: int,
               raised_left: bool | None = None, raised_right: bool | None = None) -> "PoseParams":
        return cls(
            cx=w * (0.5 + rng.uniform(-0.04, 0.04)),
            y_top=h * (0.34 + rng.uniform(-0.025, 0.025)),
            half_width=w * (0.19 + rng.uniform(-0.02, 0.02)),
            torso_height=h * (0.28 + rng.uniform(-0.02, 0.02)),
            raised_left=bool(rng.random() < 0.5) if raised_left is None else raised_left,
            raised_right=bool(rng.random() < 0.5) if raised_right is None else raised_right,
        )


def pose_keypoints(params: PoseParams, h: int, w: int) -> PoseKeypoints:
    cx, yt = params.cx, params.y_top
    hw = params.half_width
    yb = yt + params.torso_height
    head_cy = yt - 0.125 * h
    pts = np.zeros((NUM_KEYPOINTS, 3), dtype=np.float64)
    pts[:, 2] = 1.0
    pts[0] = (cx, head_cy, 1.0)  # nose
    pts[1] = (cx - 0.03 * w, head_cy - 0.02 * h, 1.0)  # eyes
    pts[2] = (cx + 0.03 * w, head_cy - 0.02 * h, 1.0)
    pts[3] = (cx - 0.06 * w, head_cy, 1.0)  # ears
    pts[4] = (cx + 0.06 * w, head_cy, 1.0)
    pts[5] = (cx - hw, yt, 1.0)  # shoulders
    pts[6] = (cx + hw, yt, 1.0)
    if params.raised_left:
        pts[7] = (cx - hw - 0.06 * w, yt - 0.04 * h, 1.0)  # elbow up
        pts[9] = (cx - hw - 0.04 * w, yt - 0.16 * h, 1.0)  # wrist up
    else:
        pts[7] = (cx - hw - 0.06 * w, yt + 0.12 * h, 1.0)
        pts[9] = (cx - hw - 0.08 * w, yt + 0.25 * h, 1.0)
    if params.raised_right:
        pts[8] = (cx + hw + 0.06 * w, yt - 0.04 * h, 1.0)
        pts[10] = (cx + hw + 0.04 * w, yt - 0.16 * h, 1.0)
    else:
        pts[8] = (cx + hw + 0.06 * w, yt + 0.12 * h, 1.0)
        pts[10] = (cx + hw + 0.08 * w, yt + 0.25 * h, 1.0)
    pts[11] = (cx - (hw - 0.04 * w), yb, 1.0)  # hips
    pts[12] = (cx + (hw - 0.04 * w), yb, 1.0)
    pts[13] = (cx - (hw - 0.06 * w), yb + 0.14 * h, 1.0)  # knees
    pts[14] = (cx + (hw - 0.06 * w), yb + 0.14 * h, 1.0)
    pts[15] = (cx - (hw - 0.06 * w), yb + 0.28 * h, 1.0)  # ankles
    pts[16] = (cx + (hw - 0.06 * w), yb + 0.28 * h, 1.0)
    return PoseKeypoints(pts)


@dataclass
class Scene:
    person: torch.Tensor
    garment: torch.Tensor
    garment_mask: torch.Tensor
    labels: torch.Tensor
    pose: PoseKeypoints


def render_scene(params: PoseParams, style: GarmentStyle, h: int, w: int) -> Scene:
    img = np.tile(BACKGROUND[:, None, None], (1, h, w)).astype(np.float32)
    img += np.linspace(0, 0.05, h, dtype=np.float32)[None, :, None]  # mild vertical light
    labels = np.zeros((h, w), dtype=np.int64)
    pose = pose_keypoints(params, h, w)
    pts = pose.points

    cx, yt = params.cx, params.y_top
    hw, th = params.half_width, params.torso_height
    yb = yt + th
    limb_r = max(h * 0.022, 1.2)

    # lower body
    _paint(img, labels, _rect_mask(h, w, yb, min(yb + 0.30 * h, h - 1), cx - hw * 0.8, cx + hw * 0.8),
           PANTS, LBL_LOWER)
    # torso wearing the garment pattern
    y0, y1 = int(round(yt)), int(round(yb))
    x0, x1 = int(round(cx - hw)), int(round(cx + hw))
    torso = _rect_mask(h, w, y0, y1, x0, x1)
    patch = style.pattern(max(y1 - y0, 1), max(x1 - x0, 1))
    img[:, y0:y1, x0:x1] = patch
    labels[torso] = LBL_UPPER
    # arms over the torso
    for side, (sh, el, wr) in (("left", (5, 7, 9)), ("right", (6, 8, 10))):
        label = LBL_LEFT_ARM if side == "left" else LBL_RIGHT_ARM
        for a, b in ((sh, el), (el, wr)):
            seg = _segment_mask(h, w, pts[a, :2], pts[b, :2], limb_r)
            _paint(img, labels, seg, SKIN, label)
    # head
    head_cy = yt - 0.125 * h
    _paint(img, labels, _disk_mask(h, w, head_cy - 0.02 * h, cx, 0.085 * h) & (_grids(h, w)[0] <= head_cy - 0.02 * h),
           HAIR, LBL_HAIR)
    _paint(img, labels, _disk_mask(h, w, head_cy, cx, 0.065 * h), SKIN, LBL_FACE)

    mask = labels == LBL_UPPER

    # product-style garment image: same pattern, canonical placement
    garment = np.tile(PRODUCT_BG[:, None, None], (1, h, w)).astype(np.float32)
    gh, gw = int(round(0.36 * h)), int(round(0.46 * w))
    gy, gx = int(round(0.5 * h - gh / 2)), int(round(0.5 * w - gw / 2))
    garment[:, gy : gy + gh, gx : gx + gw] = style.pattern(gh, gw)

    return Scene(
        person=torch.from_numpy(img.copy()),
        garment=torch.from_numpy(garment),
        garment_mask=torch.from_numpy(mask.astype(np.float32)),
        labels=torch.from_numpy(labels),
        pose=pose,
    )


def make_toy_record(
    rng: np.random.Generator,
    record_id: str,
    size: tuple[int, int],
    seg_channels: int = len(SEG_CLASSES),
    raised_left: bool | None = None,
    raised_right: bool | None = None,
) -> DatasetRecord:
    h, w = size
    params = PoseParams.sample(rng, h, w, raised_left, raised_right)
    scene = render_scene(params, GarmentStyle.sample(rng), h, w)
    human_rep = HumanRepresentation.build(scene.labels, scene.pose, seg_channels)
    return DatasetRecord(
        record_id=record_id,
        person=scene.person,
        garment=scene.garment,
        garment_mask=scene.garment_mask,
        pose=scene.pose,
        human_rep=human_rep,
        origin="real",
    )


def make_toy_dataset(n: int, size: tuple[int, int], seed: int = 0) -> list[DatasetRecord]:
    rng = np.random.default_rng(seed)
    return [make_toy_record(rng, f"toy-{i:04d}", size) for i in range(n)]


def write_toy_dataset(directory: str | Path, n: int, size: tuple[int, int], seed: int = 0) -> Path:
    """Materializes a toy dataset on disk in the manifest.json layout."""
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    records = make_toy_dataset(n, size, seed)
    entries = []
    for rec in records:
        base = f"images/{rec.record_id}"
        save_image(rec.person, directory / f"{base}_person.png")
        save_image(rec.garment, directory / f"{base}_garment.png")
        Image.fromarray((rec.garment_mask.numpy() * 255).astype(np.uint8), mode="L").save(
            directory / f"{base}_mask.png"
        )
        labels = rec.human_rep.parser_map.argmax(dim=0).numpy().astype(np.uint8)
        Image.fromarray(labels, mode="L").save(directory / f"{base}_parser.png")
        (directory / f"{base}_pose.json").write_text(json.dumps(rec.pose.to_json()))
        entries.append(
            {
                "id": rec.record_id,
                "person": f"{base}_person.png",
                "garment": f"{base}_garment.png",
                "garment_mask": f"{base}_mask.png",
                "pose": f"{base}_pose.json",
                "parser_map": f"{base}_parser.png",
                "origin": rec.origin,
            }
        )
    return write_manifest(directory, entries)


# --- keypoint markers -------------------------------------------------------

def marker_color(index: int) -> np.ndarray:
    return np.array(
        [MARKER_CH0, -1.0 + 2.0 * (index + 0.5) / NUM_KEYPOINTS, MARKER_CH2], dtype=np.float32
    )


def draw_markers(image: torch.Tensor, pose: PoseKeypoints, indices=None) -> torch.Tensor:
    """Stamps a 3x3 index-coded patch at each keypoint; returns a copy."""
    out = image.clone()
    _, h, w = out.shape
    for i in range(NUM_KEYPOINTS) if indices is None else indices:
        x, y, conf = pose.points[i]
        if conf < 0.05:
            continue
        cy, cx = int(round(y)), int(round(x))
        if not (1 <= cy < h - 1 and 1 <= cx < w - 1):
            continue
        color = torch.from_numpy(marker_color(i)).view(3, 1, 1)
        out[:, cy - 1 : cy + 2, cx - 1 : cx + 2] = color
    return out


def erase_marker(image: torch.Tensor, y: int, x: int) -> None:
    """Overwrites a marker patch with the background color, in place."""
    bg = torch.from_numpy(BACKGROUND).view(3, 1, 1)
    image[:, max(y - 1, 0) : y + 2, max(x - 1, 0) : x + 2] = bg


def make_pose_frame(
    rng: np.random.Generator,
    size: tuple[int, int],
    raised: bool,
) -> tuple[torch.Tensor, PoseKeypoints]:
    """A person frame with keypoint markers; raised flags force arm posture."""
    h, w = size
    params = PoseParams.sample(rng, h, w, raised_left=raised, raised_right=raised)
    scene = render_scene(params, GarmentStyle.sample(rng), h, w)
    return draw_markers(scene.person, scene.pose), scene.pose


def write_pose_frames(
    directory: str | Path, raised_flags: list[bool], size: tuple[int, int], seed: int = 0
) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i, raised in enumerate(raised_flags):
        frame, _ = make_pose_frame(rng, size, raised)
        path = directory / f"frame-{i:04d}.png"
        save_image(frame, path)
        paths.append(path)
    return paths
