"""COCO-ordered pose keypoints."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COCO_KEYPOINT_NAMES = (
    "nose", "left_eye", "right_eye", "left_ear", "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip",
    "left_knee", "right_knee", "left_ankle", "right_ankle",
)
NUM_KEYPOINTS = 17

# Per-keypoint falloff constants from the COCO keypoint evaluation.
COCO_KEYPOINT_SIGMAS = np.array(
    [0.026, 0.025, 0.025, 0.035, 0.035,
     0.079, 0.079, 0.072, 0.072, 0.062, 0.062,
     0.107, 0.107, 0.087, 0.087, 0.089, 0.089]
)

# Shoulders, elbows, wrists: the upper-body subset pose scoring restricts to.
ARM_HAND_INDICES = (5, 6, 7, 8, 9, 10)

# Keypoints below this confidence are treated as unobserved.
MIN_CONFIDENCE = 0.05


def keypoint_bbox_area(points: np.ndarray, min_confidence: float = MIN_CONFIDENCE) -> float:
    """Area of the tight bounding box over keypoints above the confidence floor."""
    pts = np.asarray(points, dtype=np.float64)
    visible = pts[pts[:, 2] > min_confidence]
    if len(visible) == 0:
        return 0.0
    w = float(visible[:, 0].max() - visible[:, 0].min())
    h = float(visible[:, 1].max() - visible[:, 1].min())
    return w * h


@dataclass(frozen=True)
class PoseKeypoints:
    """17 (x, y, confidence) triples in pixel coordinates plus the pose area."""

    points: np.ndarray
    bbox_area: float = field(default=0.0)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (NUM_KEYPOINTS, 3):
            raise ValueError(f"points must be ({NUM_KEYPOINTS}, 3), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("keypoints contain non-finite values")
        if (pts[:, 2] < 0).any() or (pts[:, 2] > 1).any():
            raise ValueError("confidences must lie in [0, 1]")
        area = self.bbox_area if self.bbox_area > 0 else keypoint_bbox_area(pts)
        if area <= 0:
            raise ValueError("pose bounding-box area must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "bbox_area", float(area))

    @property
    def xy(self) -> np.ndarray:
        return self.points[:, :2]

    @property
    def confidence(self) -> np.ndarray:
        return self.points[:, 2]

    def translated(self, dx: float, dy: float) -> "PoseKeypoints":
        pts = self.points.copy()
        pts[:, 0] += dx
        pts[:, 1] += dy
        return PoseKeypoints(pts, self.bbox_area)

    def scaled(self, factor: float) -> "PoseKeypoints":
        pts = self.points.copy()
        pts[:, :2] *= factor
        return PoseKeypoints(pts, self.bbox_area * factor * factor)

    def to_json(self) -> dict:
        return {"keypoints": self.points.tolist(), "bbox_area": self.bbox_area}

    @classmethod
    def from_json(cls, obj: dict) -> "PoseKeypoints":
        pts = np.asarray(obj["keypoints"], dtype=np.float64)
        return cls(pts, float(obj.get("bbox_area", 0.0)))
